use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use kronstate::graph::{catalog_names, catalog_note, compatible_assignments, graph_kron_state};
use kronstate::oracle::{
    check_invariance, projector_with_cap, reduced_density, span_equal, PROJECTOR_CAP,
};
use kronstate::partitions::{enumerate_paths, kron_coeff, kron_coeff_general, sn_dim_usize};
use kronstate::schur::{irrep_matrix, parse_bits, schur_expand, Permutation};
use kronstate::subspace::{
    cgc_to_tsv, effective_kron_coeff, export_cgc, kron_basis, kron_basis_with, BasisOptions,
};
use kronstate::wkron::w_kron_state;
use kronstate::{
    named_graph, InnerAssignment, KronError, PartitionTuple, Rational, SparseKronVector,
    StitchGraph, SurdSum, TwoRowPartition,
};

use crate::manifest::{sha256_hex, write_artifact, Artifact, GraphInfo, RunManifest};
use crate::{CliError, CliResult};

fn tuple_arg(s: &str) -> CliResult<PartitionTuple> {
    Ok(s.parse::<PartitionTuple>()?)
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

/// Catalog name or path to a graph JSON file.
pub fn resolve_graph(spec: &str) -> CliResult<(String, StitchGraph, Option<String>)> {
    if catalog_names().iter().any(|n| n == spec) {
        return Ok((spec.to_string(), named_graph(spec)?, catalog_note(spec)));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(KronError::Input(format!(
            "'{spec}' is neither a catalog graph ({}) nor a file",
            catalog_names().join(", ")
        ))
        .into());
    }
    let g = StitchGraph::from_json(&std::fs::read_to_string(path)?)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    Ok((name, g, None))
}

fn default_graph(t: &PartitionTuple) -> CliResult<&'static str> {
    match t.len() {
        3 => Ok("triangle"),
        4 => Ok("prism47"),
        m => Err(KronError::Input(format!("no default graph for {m} parts, pass --graph")).into()),
    }
}

/// One line per nonzero entry: the path index in each part, then the value.
pub fn coords_text(v: &SparseKronVector) -> String {
    let mut s = String::new();
    let axes: Vec<String> = (1..=v.tuple().len()).map(|i| format!("i{i}")).collect();
    let _ = writeln!(s, "# {}\tvalue", axes.join("\t"));
    let tables = v.tables();
    for (paths, c) in v.iter() {
        let idx: Vec<String> = paths
            .iter()
            .zip(tables)
            .map(|(q, t)| {
                t.index_of(q)
                    .expect("path belongs to its table")
                    .to_string()
            })
            .collect();
        let _ = writeln!(s, "{}\t{:.17e}", idx.join("\t"), c.to_f64());
    }
    s
}

pub fn coeff(tuple: &str, json: bool) -> CliResult<()> {
    let t = tuple_arg(tuple)?;
    let k = kron_coeff(&t);
    if json {
        print_json(&serde_json::json!({ "tuple": t.to_string(), "k": k }));
    } else {
        println!("{k}");
    }
    Ok(())
}

pub struct BasisArgs {
    pub verify: bool,
    pub exhaustive: bool,
    pub entry_cap: Option<u64>,
    pub seed: u64,
    pub dump_coords: bool,
}

pub fn basis(
    graph: &str,
    tuple: &str,
    outdir: &Path,
    args: &BasisArgs,
    json: bool,
) -> CliResult<()> {
    let t = tuple_arg(tuple)?;
    let (name, g, note) = resolve_graph(graph)?;
    let mut opts = if args.exhaustive {
        BasisOptions::exhaustive()
    } else {
        BasisOptions::default()
    };
    opts.seed = args.seed;
    if let Some(c) = args.entry_cap {
        opts.entry_cap = c;
    }
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let b = kron_basis_with(&name, &g, &t, &opts)?;
    timings.insert("basis".to_string(), start.elapsed().as_secs_f64());

    std::fs::create_dir_all(outdir)?;
    let mut vectors = Vec::new();
    let mut extra = Vec::new();
    for (i, (v, p)) in b.vectors.iter().zip(&b.provenance).enumerate() {
        let mut a = write_artifact(outdir, &format!("vec_{i:03}.txt"), &v.to_text())?;
        a.provenance = Some(p.clone());
        a.nnz = Some(v.nnz());
        vectors.push(a);
        if args.dump_coords {
            extra.push(write_artifact(
                outdir,
                &format!("coords_{i:03}.tsv"),
                &coords_text(v),
            )?);
        }
    }

    let mut failed = false;
    if args.verify {
        let start = Instant::now();
        let checks = check_vectors(&b.vectors)?;
        timings.insert("verify".to_string(), start.elapsed().as_secs_f64());
        failed = report(&checks, false);
    }

    let definition = serde_json::from_str(&g.to_json()).map_err(|e| CliError {
        code: 2,
        message: e.to_string(),
    })?;
    let manifest = RunManifest {
        command: "basis".into(),
        inputs: vec![graph.to_string(), tuple.to_string()],
        tuple: t.to_string(),
        kron_coeff: kron_coeff(&t),
        graph: Some(GraphInfo {
            name,
            note,
            definition,
        }),
        vectors,
        extra,
        timings,
    };
    manifest.write(outdir)?;
    if json {
        print_json(&manifest);
    } else {
        println!(
            "{}\tk={}\tbasis={}",
            manifest.tuple,
            manifest.kron_coeff,
            manifest.vectors.len()
        );
        for a in &manifest.vectors {
            let p = a
                .provenance
                .as_ref()
                .map(|p| p.to_string())
                .unwrap_or_default();
            println!("{}\t{}\tnnz={}", a.file, p, a.nnz.unwrap_or(0));
        }
    }
    if failed {
        return Err(KronError::Verification("basis checks failed".into()).into());
    }
    Ok(())
}

pub fn cgc(tuple: &str, pivot: usize, graph: Option<&str>, outfile: &Path) -> CliResult<()> {
    let t = tuple_arg(tuple)?;
    let b = match graph {
        Some(g) => {
            let (name, g, _) = resolve_graph(g)?;
            kron_basis_with(&name, &g, &t, &BasisOptions::default())?
        }
        None => kron_basis(default_graph(&t)?, &t)?,
    };
    let records = export_cgc(&b, pivot)?;
    let text = cgc_to_tsv(&t, pivot, &records);
    if outfile == Path::new("-") {
        print!("{text}");
    } else {
        std::fs::write(outfile, text)?;
    }
    Ok(())
}

pub fn wstate(tuple: &str, dump_coords: bool) -> CliResult<()> {
    let t = tuple_arg(tuple)?;
    let v = w_kron_state(&t)?;
    print!(
        "{}",
        if dump_coords {
            coords_text(&v)
        } else {
            v.to_text()
        }
    );
    Ok(())
}

pub fn schur(bits: &str, json: bool) -> CliResult<()> {
    let s = parse_bits(bits)?;
    let rows = schur_expand(&s);
    if json {
        let v: Vec<_> = rows
            .iter()
            .map(|(p, q, c)| serde_json::json!({ "partition": p.to_string(), "path": q.to_string(), "value": c.to_string() }))
            .collect();
        print_json(&v);
    } else {
        for (p, q, c) in rows {
            println!("{p}\t{q}\t{c}");
        }
    }
    Ok(())
}

pub fn irrep(partition: &str, cycles: &str, json: bool) -> CliResult<()> {
    let p: TwoRowPartition = partition.parse()?;
    let pi = Permutation::from_cycles(p.n, cycles)?;
    let m = irrep_matrix(p, &pi)?;
    let paths: Vec<String> = enumerate_paths(p).iter().map(|q| q.to_string()).collect();
    let rows: Vec<Vec<String>> = m
        .entries
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    if json {
        print_json(&serde_json::json!({
            "partition": p.to_string(),
            "permutation": pi.to_string(),
            "basis": paths,
            "matrix": rows,
        }));
    } else {
        println!("# basis={}", paths.join(","));
        for r in rows {
            println!("{}", r.join("\t"));
        }
    }
    Ok(())
}

/// `None` marks a check that was skipped.
pub type Check = (String, Option<bool>);

fn is_identity_over(m: &[Vec<SurdSum>], f: usize) -> bool {
    let d = SurdSum::from_rational(Rational::new(1.into(), (f as i64).into()));
    m.len() == f
        && m.iter().enumerate().all(|(i, r)| {
            r.len() == f
                && r.iter()
                    .enumerate()
                    .all(|(j, x)| if i == j { *x == d } else { x.is_zero() })
        })
}

/// Invariance, unit norm, maximal local mixedness, orthogonality and,
/// when the projector fits, membership and span against it.
pub fn check_vectors(vs: &[SparseKronVector]) -> CliResult<Vec<Check>> {
    let mut out: Vec<Check> = Vec::new();
    let Some(first) = vs.first() else {
        return Ok(out);
    };
    let t = first.tuple().clone();
    if vs.iter().any(|v| v.tuple() != &t) {
        return Err(KronError::Input("vectors belong to different tuples".into()).into());
    }
    for (i, v) in vs.iter().enumerate() {
        out.push((format!("vec{i}.invariant"), Some(check_invariance(v)?)));
        let unit = v.norm_sq() == Rational::from_integer(1.into());
        out.push((format!("vec{i}.unit_norm"), Some(unit)));
        if unit {
            let lme = (0..t.len()).try_fold(true, |acc, j| -> CliResult<bool> {
                Ok(acc && is_identity_over(&reduced_density(v, j)?, sn_dim_usize(t.part(j))))
            })?;
            out.push((format!("vec{i}.max_mixed"), Some(lme)));
        } else {
            out.push((format!("vec{i}.max_mixed"), None));
        }
    }
    if vs.len() > 1 {
        let mut ok = true;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                ok &= vs[i].inner(&vs[j])?.is_zero();
            }
        }
        out.push(("orthogonal".into(), Some(ok)));
    }
    out.push((
        "count_le_k".into(),
        Some(vs.len() as u64 <= kron_coeff_general(&t)),
    ));
    match projector_with_cap(&t, PROJECTOR_CAP) {
        Ok(p) => {
            let mut fixed = true;
            for v in vs {
                fixed &= p.fixes(v)?;
            }
            out.push(("projector_fixes".into(), Some(fixed)));
            let rank = p.trace();
            if rank == Rational::from_integer((vs.len() as i64).into())
                && vs.iter().all(|v| v.is_normalized())
            {
                out.push(("projector_span".into(), Some(span_equal(vs, &p.basis()?)?)));
            } else {
                out.push(("projector_span".into(), None));
            }
        }
        Err(KronError::Cap(_)) => {
            out.push(("projector_fixes".into(), None));
            out.push(("projector_span".into(), None));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

/// Prints the checks and returns true if any failed.
fn report(checks: &[Check], json: bool) -> bool {
    if json {
        let m: BTreeMap<&str, Option<bool>> =
            checks.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        print_json(&m);
    } else {
        for (name, r) in checks {
            let s = match r {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "skipped",
            };
            println!("{name}\t{s}");
        }
    }
    checks.iter().any(|(_, r)| *r == Some(false))
}

fn read_vector(path: &Path) -> CliResult<(SparseKronVector, String)> {
    let text = std::fs::read_to_string(path)?;
    let v = SparseKronVector::from_text(&text)?;
    Ok((v, text))
}

pub fn verify(path: &Path, json: bool) -> CliResult<()> {
    let mut checks: Vec<Check> = Vec::new();
    let mut vs = Vec::new();
    if path.is_dir() {
        let manifest = RunManifest::read(path)?;
        let all: Vec<&Artifact> = manifest.vectors.iter().chain(&manifest.extra).collect();
        for a in all {
            let bytes = std::fs::read(path.join(&a.file))?;
            checks.push((
                format!("{}.digest", a.file),
                Some(sha256_hex(&bytes) == a.sha256),
            ));
        }
        for a in &manifest.vectors {
            let (v, _) = read_vector(&path.join(&a.file))?;
            checks.push((
                format!("{}.tuple", a.file),
                Some(v.tuple().to_string() == manifest.tuple),
            ));
            vs.push(v);
        }
    } else {
        vs.push(read_vector(path)?.0);
    }
    checks.extend(check_vectors(&vs)?);
    if report(&checks, json) {
        return Err(KronError::Verification(format!("{} failed checks", path.display())).into());
    }
    Ok(())
}

/// Four-part tuples with parts in 1..=n/2, sorted, with nonzero coefficient.
pub fn table62_tuples(nmax: usize) -> Vec<PartitionTuple> {
    let mut out = Vec::new();
    for n in 3..=nmax {
        let h = n / 2;
        for a in 1..=h {
            for b in a..=h {
                for c in b..=h {
                    for d in c..=h {
                        let t = PartitionTuple {
                            n,
                            parts: vec![a, b, c, d],
                        };
                        if kron_coeff_general(&t) > 0 {
                            out.push(t);
                        }
                    }
                }
            }
        }
    }
    out
}

pub const TABLE62_GRAPHS: [&str; 4] = ["pair", "square", "bowtie", "prism47"];

pub fn table62(nmax: usize, json: bool) -> CliResult<()> {
    let graphs: Vec<StitchGraph> = TABLE62_GRAPHS
        .iter()
        .map(|g| named_graph(g))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    if !json {
        println!("n\tlambda\tk\t{}", TABLE62_GRAPHS.join("\t"));
    }
    for t in table62_tuples(nmax) {
        let k = kron_coeff_general(&t);
        let eff: Vec<usize> = graphs
            .iter()
            .map(|g| effective_kron_coeff(g, &t))
            .collect::<Result<_, _>>()?;
        let lam: Vec<String> = t.parts.iter().map(|l| l.to_string()).collect();
        if json {
            let mut row = serde_json::json!({ "n": t.n, "lambda": t.parts, "k": k });
            for (g, e) in TABLE62_GRAPHS.iter().zip(&eff) {
                row[*g] = (*e).into();
            }
            rows.push(row);
        } else {
            let e: Vec<String> = eff.iter().map(|x| x.to_string()).collect();
            println!("{}\t({})\t{}\t{}", t.n, lam.join(","), k, e.join("\t"));
        }
    }
    if json {
        print_json(&rows);
    }
    Ok(())
}

pub fn graph_state(graph: &str, n: usize, ext: &str, mu: &str, dump_coords: bool) -> CliResult<()> {
    let t = tuple_arg(&format!("{n}:{ext}"))?;
    let (_, g, _) = resolve_graph(graph)?;
    let mu: InnerAssignment = mu.parse()?;
    let v = match graph_kron_state(&g, &t, &mu)? {
        Some(v) => v,
        None => {
            eprintln!("kron: state vanishes for mu={mu}");
            SparseKronVector::zero(t)?
        }
    };
    print!(
        "{}",
        if dump_coords {
            coords_text(&v)
        } else {
            v.to_text()
        }
    );
    Ok(())
}

pub fn graph_labels(graph: &str, tuple: &str) -> CliResult<()> {
    let t = tuple_arg(tuple)?;
    let (_, g, _) = resolve_graph(graph)?;
    for mu in compatible_assignments(&g, &t)? {
        println!("{mu}");
    }
    Ok(())
}

pub fn graph_list(json: bool) -> CliResult<()> {
    let names = catalog_names();
    if json {
        let m: BTreeMap<String, Option<String>> =
            names.iter().map(|n| (n.clone(), catalog_note(n))).collect();
        print_json(&m);
    } else {
        for n in names {
            println!("{n}\t{}", catalog_note(&n).unwrap_or_default());
        }
    }
    Ok(())
}
