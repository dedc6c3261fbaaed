use std::fmt::Write;

use rand::SeedableRng;

use super::chain::{RcChain, RcParams, RcState};
use super::spin::SpinField;
use crate::error::Result;
use crate::rng::StreamRng;
use crate::spacetime::format::{field, fmt_time, parse_err, read_configuration, write_configuration};

/// Serialises a chain: the configuration records, then `RC`, `RNG` and one
/// `SPIN x a b s` record per constant piece.
pub fn write_checkpoint(chain: &RcChain, seed: u64) -> String {
    let bx = chain.space_time_box();
    let state = chain.state();
    let p = chain.params();
    let mut out = write_configuration(bx, &state.config, seed);
    writeln!(
        out,
        "RC q={} lambda={} delta={} burn_in={} sweeps={} completed={}",
        p.q,
        fmt_time(p.lambda),
        fmt_time(p.delta),
        p.burn_in,
        p.sweeps,
        chain.completed_sweeps()
    )
    .unwrap();
    let rng = chain.rng();
    let key: String = rng.get_seed().iter().map(|b| format!("{b:02x}")).collect();
    writeln!(out, "RNG {key} {} {}", rng.get_stream(), rng.get_word_pos()).unwrap();
    for x in 0..state.spins.vertex_count() {
        for (a, b, s) in state.spins.pieces(x, bx.time_length()) {
            writeln!(out, "SPIN {x} {} {} {s}", fmt_time(a), fmt_time(b)).unwrap();
        }
    }
    out
}

/// Inverse of [`write_checkpoint`]; the resumed chain continues with the
/// exact draws the original would have made.
pub fn read_checkpoint(text: &str) -> Result<(RcChain, u64)> {
    let parsed = read_configuration(text)?;
    let bx = parsed.bx;
    let n = bx.vertex_count();
    let mut params = None;
    let mut rng = None;
    let mut completed = 0;
    let mut pieces: Vec<Vec<(f64, f64, u8)>> = vec![Vec::new(); n];
    for (ln, line) in &parsed.extra {
        let ln = *ln;
        let mut toks = line.split_whitespace();
        match toks.next().unwrap_or("") {
            "RC" => {
                let mut p = RcParams::new(0.0, 1.0, 1);
                for tok in toks {
                    let (k, v) = tok.split_once('=').ok_or_else(|| parse_err(ln, format!("bad RC field `{tok}`")))?;
                    match k {
                        "q" => p.q = field(Some(v), ln, "q")?,
                        "lambda" => p.lambda = field(Some(v), ln, "lambda")?,
                        "delta" => p.delta = field(Some(v), ln, "delta")?,
                        "burn_in" => p.burn_in = field(Some(v), ln, "burn-in")?,
                        "sweeps" => p.sweeps = field(Some(v), ln, "sweeps")?,
                        "completed" => completed = field(Some(v), ln, "completed sweeps")?,
                        _ => return Err(parse_err(ln, format!("unknown RC field `{k}`"))),
                    }
                }
                params = Some(p);
            }
            "RNG" => {
                let key = toks.next().ok_or_else(|| parse_err(ln, "missing RNG key"))?;
                if key.len() != 64 {
                    return Err(parse_err(ln, "RNG key must be 64 hex digits"));
                }
                let mut seed = [0u8; 32];
                for (i, byte) in seed.iter_mut().enumerate() {
                    *byte = u8::from_str_radix(&key[2 * i..2 * i + 2], 16).map_err(|_| parse_err(ln, "bad RNG key"))?;
                }
                let stream: u64 = field(toks.next(), ln, "RNG stream")?;
                let word_pos: u128 = field(toks.next(), ln, "RNG word position")?;
                let mut r = StreamRng::from_seed(seed);
                r.set_stream(stream);
                r.set_word_pos(word_pos);
                rng = Some(r);
            }
            "SPIN" => {
                let x: usize = field(toks.next(), ln, "vertex")?;
                let a: f64 = field(toks.next(), ln, "piece start")?;
                let b: f64 = field(toks.next(), ln, "piece end")?;
                let s: u8 = field(toks.next(), ln, "spin")?;
                if x >= n {
                    return Err(parse_err(ln, format!("vertex {x} out of range")));
                }
                if a >= b {
                    return Err(parse_err(ln, "empty spin piece"));
                }
                pieces[x].push((a, b, s));
            }
            other => return Err(parse_err(ln, format!("unknown record `{other}`"))),
        }
    }
    let params = params.ok_or_else(|| parse_err(0, "missing RC record"))?;
    let rng = rng.ok_or_else(|| parse_err(0, "missing RNG record"))?;
    let mut jumps = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for (x, line) in pieces.iter_mut().enumerate() {
        line.sort_by(|p, q| p.0.total_cmp(&q.0));
        let tiles = !line.is_empty()
            && line[0].0 == 0.0
            && line[line.len() - 1].1 == bx.time_length()
            && line.windows(2).all(|w| w[0].1 == w[1].0);
        if !tiles {
            return Err(parse_err(0, format!("spin pieces of line {x} do not tile [0, T]")));
        }
        jumps.push(line[1..].iter().map(|p| p.0).collect());
        values.push(line.iter().map(|p| p.2).collect());
    }
    let spins = SpinField::from_pieces(&bx, params.q, jumps, values)?;
    let chain = RcChain::resume(bx, params, RcState { config: parsed.config, spins }, rng, completed)?;
    Ok((chain, parsed.seed))
}
