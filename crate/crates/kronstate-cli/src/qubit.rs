use std::path::Path;

use kronstate::qubitlab::{
    epsilon_invariant, identity2, parse_state, stitch_contract, StitchMatrix, C64,
};
use kronstate::{ContractionPattern, KronError, QubitTensor};

use crate::commands::resolve_graph;
use crate::CliResult;

const PRINT_EPS: f64 = 1e-12;

/// Parses `e=a,b;c,d` with an optional `:psi` suffix.
fn parse_stitch(s: &str) -> CliResult<(usize, StitchMatrix, bool)> {
    let bad = || KronError::Parse(format!("expected e=a,b;c,d[:psi], got '{s}'"));
    let (e, rest) = s.split_once('=').ok_or_else(bad)?;
    let e: usize = e.trim().parse().map_err(|_| bad())?;
    let (body, psi) = match rest.rsplit_once(':') {
        Some((b, "psi")) => (b, true),
        Some(_) => return Err(bad().into()),
        None => (rest, false),
    };
    let rows: Vec<&str> = body.split(';').collect();
    if rows.len() != 2 {
        return Err(bad().into());
    }
    let mut m = identity2();
    for (i, r) in rows.iter().enumerate() {
        let xs: Vec<&str> = r.split(',').collect();
        if xs.len() != 2 {
            return Err(bad().into());
        }
        for (j, x) in xs.iter().enumerate() {
            m[i][j] = x.trim().parse::<C64>().map_err(|_| bad())?;
        }
    }
    Ok((e, m, psi))
}

fn print_tensor(t: &QubitTensor, json: bool) {
    let n = t.n_qubits;
    let rows: Vec<(String, C64)> = t
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > PRINT_EPS)
        .map(|(i, a)| (format!("{i:0n$b}"), *a))
        .collect();
    if json {
        let v: Vec<_> = rows
            .iter()
            .map(|(b, a)| serde_json::json!({ "bits": b, "re": a.re, "im": a.im }))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("serializable")
        );
    } else {
        for (b, a) in rows {
            println!("{b}\t{}\t{}", a.re, a.im);
        }
    }
}

pub fn contract(graph: &str, stitch: &[String], json: bool) -> CliResult<()> {
    let (_, g, _) = resolve_graph(graph)?;
    let e_count = g.edge_count();
    let mut mats = vec![identity2(); e_count];
    let mut psi = vec![false; e_count];
    for s in stitch {
        let (e, m, p) = parse_stitch(s)?;
        if e >= e_count {
            return Err(KronError::Input(format!(
                "edge {e} out of range, graph has {e_count} inner edges"
            ))
            .into());
        }
        mats[e] = m;
        psi[e] = p;
    }
    print_tensor(&stitch_contract(&g, &mats, &psi)?, json);
    Ok(())
}

pub fn invariant(statefile: &Path, qubits: usize, pattern: &str, json: bool) -> CliResult<()> {
    let t = parse_state(&std::fs::read_to_string(statefile)?, qubits)?;
    let pat = match pattern {
        "b0" => ContractionPattern::b0(qubits),
        "hyperdet" => ContractionPattern::hyperdeterminant(),
        file => ContractionPattern::from_json(&std::fs::read_to_string(file)?)?,
    };
    let v = epsilon_invariant(&t, &pat)?;
    if json {
        println!(
            "{}",
            serde_json::json!({ "re": v.re, "im": v.im, "abs": v.norm() })
        );
    } else {
        println!("{}\t{}", v.re, v.im);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stitch_syntax() {
        let (e, m, psi) = parse_stitch("2=1,0.5;0,1+2i:psi").unwrap();
        assert_eq!(e, 2);
        assert!(psi);
        assert_eq!(m[0][1], C64::new(0.5, 0.0));
        assert_eq!(m[1][1], C64::new(1.0, 2.0));
        assert!(parse_stitch("0=1,0").is_err());
        assert!(parse_stitch("0=1,0;0,1:phi").is_err());
    }
}
