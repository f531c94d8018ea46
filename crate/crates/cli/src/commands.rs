use std::fs;

use num_complex::Complex;

use circortho::appendix::{parse_appendix, parse_entry};
use circortho::catalog::{read_jsonl, CatalogRecord, RecordKind};
use circortho::feasibility::{
    admissible_even_orders, even_order_report, quaternary_forms, trivial_construction,
    CandidateStatus,
};
use circortho::mub::{fourier_basis, identity, unbiasedness_residual, xz_eigenbasis};
use circortho::ringzm::{
    all_minus_family, all_minus_generator, one_plus_family, one_plus_generator, one_plus_orders,
    parity_filter, search_zm,
};
use circortho::scalar::unit_root;
use circortho::search::{search_order, SearchConfig};
use circortho::spectral::{verify_conditions, VerificationReport, DEFAULT_TOL, INGESTED_TOL};
use circortho::{DiagonalValue, Generator, Rational};

use crate::args::{
    ClassifyArgs, ConstructArgs, Family, Format, MubArgs, SearchArgs, VerifyArgs, ZmArgs,
};
use crate::output::{
    flush_stdout, provenance, resolve_tol, write_catalog, write_csv, CmdResult, Failure,
    PARSE_FAILED, PASS, VERIFY_FAILED,
};

/// Largest order `classify --search` will settle by exhaustive search.
const CLASSIFY_SEARCH_MAX_N: u64 = 22;

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn residual_line(r: &VerificationReport<f64>) -> String {
    format!(
        "gram {:.3e}  unimodular {:.3e}  diagonal {:.3e}  {}",
        r.gram_residual,
        r.unimodularity_residual,
        r.diagonal_residual,
        if r.passes { "PASS" } else { "FAIL" }
    )
}

fn emit(
    records: &[CatalogRecord],
    out: Option<&std::path::Path>,
    format: Format,
) -> Result<(), Failure> {
    match (out, format) {
        (Some(path), Format::Jsonl) => write_catalog(path, records),
        (Some(path), Format::Csv) => write_csv(path, records),
        (None, _) => Ok(()),
    }
}

pub fn search(args: SearchArgs) -> CmdResult {
    let tol = resolve_tol(args.tol, DEFAULT_TOL)?;
    let config = SearchConfig {
        tol,
        restrict_d: None,
        workers: args.workers,
    };
    let mut records = Vec::new();
    println!("n | d | d^2 | d (approx)");
    for n in args.n.orders() {
        let outcome = search_order(n, &config)?;
        let ds = outcome.diagonals();
        println!(
            "{n} | {} | {} | {}",
            join(ds.iter().map(DiagonalValue::surd_display), ", "),
            join(ds.iter().map(DiagonalValue::d_squared), ", "),
            join(ds.iter().map(|d| format!("{:.6}", d.approx())), ", "),
        );
        flush_stdout();
        let prov = provenance(&format!("search --n {n} --tol {tol:e}"));
        records.extend(
            outcome
                .solutions
                .iter()
                .map(|s| CatalogRecord::from_solution(s, prov.clone())),
        );
    }
    emit(&records, args.out.as_deref(), args.format)?;
    Ok(PASS)
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let text = fs::read_to_string(&args.file).map_err(|e| Failure::io(&args.file, e))?;
    let jsonl = text.trim_start().starts_with('{');
    let mut all_pass = true;
    let mut count = 0;
    if jsonl {
        let records = read_jsonl(text.as_bytes())?;
        for (i, r) in records.iter().enumerate() {
            let tol = resolve_tol(args.tol, r.residuals.tol.max(f64::MIN_POSITIVE))?;
            let report = r.reverify_at(tol)?;
            all_pass &= report.passes;
            println!(
                "record {}: {} n = {} d^2 = {}  {}",
                i + 1,
                serde_json::to_value(r.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                r.n,
                r.d_squared,
                residual_line(&report)
            );
        }
        count = records.len();
    } else {
        let tol = resolve_tol(args.tol, INGESTED_TOL)?;
        for block in parse_appendix(&text)? {
            let report = verify_conditions(&block.generator, &block.d, tol)?;
            all_pass &= report.passes;
            println!(
                "n = {}, d = {} (line {})  {}",
                block.n,
                block.d,
                block.line,
                residual_line(&report)
            );
            count += 1;
        }
    }
    if count == 0 {
        return Err(Failure {
            code: PARSE_FAILED,
            message: format!("{}: no records found", args.file.display()),
        });
    }
    println!(
        "{count} record(s), {}",
        if all_pass {
            "all pass"
        } else {
            "FAILURES present"
        }
    );
    Ok(if all_pass { PASS } else { VERIFY_FAILED })
}

/// Exhaustive search for diagonal `d` at order `n`; `true` when found.
fn search_settles(n: u64, d: &DiagonalValue, workers: usize) -> Result<bool, Failure> {
    let config = SearchConfig {
        tol: DEFAULT_TOL,
        restrict_d: Some(d.clone()),
        workers,
    };
    Ok(!search_order(n as usize, &config)?.solutions.is_empty())
}

/// Status of every candidate diagonal at even order `n`, after an optional search.
fn even_statuses(
    n: u64,
    search: bool,
    workers: usize,
) -> Result<Vec<(DiagonalValue, CandidateStatus, String)>, Failure> {
    let mut out = Vec::new();
    for e in even_order_report(n)? {
        let mut status = e.status;
        let mut note = if e.candidate.excluded {
            "d irrational".to_string()
        } else {
            join(e.verdict.rules(), ", ")
        };
        if search && status == CandidateStatus::Open && n <= CLASSIFY_SEARCH_MAX_N {
            let found = search_settles(n, &e.candidate.d, workers)?;
            status = if found {
                CandidateStatus::Exists
            } else {
                CandidateStatus::Excluded
            };
            note = "settled by search".to_string();
        }
        out.push((e.candidate.d, status, note));
    }
    Ok(out)
}

fn summary(n: u64, entries: &[(DiagonalValue, CandidateStatus, String)]) -> String {
    let live: Vec<_> = entries
        .iter()
        .filter(|e| e.1 != CandidateStatus::Excluded)
        .collect();
    match live.as_slice() {
        [(d, _, _)] => format!("n = {n}: d = {d} only"),
        _ => format!(
            "n = {n}: {}",
            join(live.iter().map(|(d, s, _)| format!("d = {d} ({s})")), "; ")
        ),
    }
}

pub fn classify(args: ClassifyArgs) -> CmdResult {
    if let Some(d) = args.d {
        let n_max = args
            .n_max
            .ok_or_else(|| Failure::usage("--d needs --n-max"))?;
        let orders = admissible_even_orders(d, n_max)?;
        let dv = DiagonalValue::integer(d);
        let mut parts = Vec::new();
        for n in orders {
            let status = if n == 2 * d + 2 {
                CandidateStatus::Exists
            } else if args.search && n <= CLASSIFY_SEARCH_MAX_N {
                if search_settles(n, &dv, args.workers)? {
                    CandidateStatus::Exists
                } else {
                    CandidateStatus::Excluded
                }
            } else {
                CandidateStatus::Open
            };
            parts.push(format!("{n}: {status}"));
        }
        println!("d = {d}, even n ≤ {n_max}");
        println!(
            "{}",
            if parts.is_empty() {
                "none".to_string()
            } else {
                parts.join("; ")
            }
        );
        return Ok(PASS);
    }

    let range = args
        .n
        .ok_or_else(|| Failure::usage("one of --n or --d is required"))?;
    if let Some(n) = range.single() {
        if n % 2 == 1 {
            return Err(Failure::usage(format!(
                "order {n} is odd; the filters cover even orders, use `search --n {n}`"
            )));
        }
        let entries = even_statuses(n as u64, args.search, args.workers)?;
        println!("d | d^2 | d (approx) | status | reasons");
        for (d, status, note) in &entries {
            println!(
                "{d} | {} | {:.6} | {status} | {note}",
                d.d_squared(),
                d.approx()
            );
        }
        println!("{}", summary(n as u64, &entries));
        return Ok(PASS);
    }

    let mut open = Vec::new();
    for n in range.orders().filter(|n| n % 2 == 0) {
        let entries = even_statuses(n as u64, args.search, args.workers)?;
        println!("{}", summary(n as u64, &entries));
        open.extend(
            entries
                .into_iter()
                .filter(|e| e.1 == CandidateStatus::Open)
                .map(|e| (n, e.0)),
        );
    }
    println!();
    println!("open pairs with d ≠ n/2 − 1: {}", open.len());
    println!("n | d | d^2 | d (approx)");
    for (n, d) in &open {
        println!("{n} | {d} | {} | {:.6}", d.d_squared(), d.approx());
    }
    Ok(PASS)
}

pub fn construct(args: ConstructArgs) -> CmdResult {
    let tol = resolve_tol(args.tol, DEFAULT_TOL)?;
    let mut records = Vec::new();
    if args.trivial {
        let (n, nu) = (args.n.unwrap_or(0), args.nu.unwrap_or(0));
        let g: Generator = trivial_construction(n, nu)?;
        let d = DiagonalValue::from_rational(Rational::ratio(n as i64 - 2, 2))?;
        let report = verify_conditions(&g, &d, tol)?;
        println!("{g}");
        println!("d = {d}  {}", residual_line(&report));
        let prov = provenance(&format!("construct --trivial --n {n} --nu {nu}"));
        records.push(CatalogRecord::complex(
            RecordKind::Complex,
            &g,
            &d,
            tol,
            prov,
        )?);
    } else {
        let text = args.d.as_deref().unwrap_or_default();
        let d = DiagonalValue::parse_expr(text).map_err(|e| Failure::usage(e.to_string()))?;
        let forms = quaternary_forms(&d);
        if forms.is_empty() {
            return Err(Failure::usage(format!(
                "no quaternary form: 2d = 2·{d} is not a non-negative integer"
            )));
        }
        let prov = provenance(&format!("construct --quaternary --d {text}"));
        for f in &forms {
            let g = f.generator();
            let tag = if f.conjectural { "  [conjectural]" } else { "" };
            println!("{g}{tag}");
            records.push(CatalogRecord::complex(
                RecordKind::Quaternary,
                &g,
                &d,
                tol,
                prov.clone(),
            )?);
        }
    }
    emit(&records, args.out.as_deref(), Format::Jsonl)?;
    Ok(PASS)
}

pub fn zm(args: ZmArgs) -> CmdResult {
    let (m, n) = (args.m, args.n);
    if !parity_filter(m, n) {
        println!("m = {m} even and n = {n} odd: excluded by parity");
    }
    let prov_base = format!("zm --m {m} --n {n}");
    let mut records = Vec::new();

    if args.orders {
        let fam = one_plus_orders(m, n)?;
        println!(
            "one-plus orders over Z_{m} (step {}): n ∈ {{{}}}",
            fam.step,
            join(&fam.orders, ", ")
        );
        if !fam.skipped_ell.is_empty() {
            println!("skipped ℓ (odd n): {}", join(&fam.skipped_ell, ", "));
        }
        return Ok(PASS);
    }

    let generators = if let Some(family) = args.family {
        let (name, ds) = match family {
            Family::AllMinus => ("all-minus", all_minus_family(m, n)?),
            Family::OnePlus => ("one-plus", one_plus_family(m, n)?),
        };
        println!("{name} over Z_{m}, n = {n}: d ∈ {{{}}}", join(&ds, ", "));
        ds.iter()
            .map(|&d| match family {
                Family::AllMinus => all_minus_generator(m, n as usize, d),
                Family::OnePlus => one_plus_generator(m, n as usize, d),
            })
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let found = search_zm(m, n as usize, args.symmetric)?;
        println!(
            "{} {}generator(s) over Z_{m}, n = {n}",
            found.len(),
            if args.symmetric { "symmetric " } else { "" }
        );
        found
    };

    let prov = provenance(&prov_base);
    for g in &generators {
        println!("{g}");
        records.push(CatalogRecord::zm(g, prov.clone())?);
    }
    emit(&records, args.out.as_deref(), Format::Jsonl)?;
    Ok(PASS)
}

/// `w` is ω, `w2` or `w^2` is ω², a leading `-` negates; anything else is a
/// complex literal.
fn parse_mub_entry(token: &str, n: usize) -> Result<Complex<f64>, Failure> {
    let t = token.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(b) if b.trim_start().starts_with(['w', 'ω']) => (-1.0, b.trim_start()),
        _ => (1.0, t),
    };
    if let Some(exp) = body.strip_prefix('w').or_else(|| body.strip_prefix('ω')) {
        let exp = exp.trim_start_matches('^');
        let k: i64 = if exp.is_empty() {
            1
        } else {
            exp.parse()
                .map_err(|_| Failure::usage(format!("bad power in `{t}`")))?
        };
        return Ok(unit_root::<f64>(k, n) * sign);
    }
    parse_entry(t).map_err(Failure::usage)
}

pub fn mub(args: MubArgs) -> CmdResult {
    let n = args.n;
    let tol = resolve_tol(args.tol, DEFAULT_TOL)?;
    if args.xz {
        let bases = [
            ("I", identity::<f64>(n)?),
            ("F", fourier_basis(n)?),
            ("XZ", xz_eigenbasis(n)?),
        ];
        let mut ok = true;
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let r = unbiasedness_residual(&bases[a].1, &bases[b].1)?;
            ok &= r <= tol;
            println!("{}-{}: residual {r:.3e}", bases[a].0, bases[b].0);
        }
        println!("{}", if ok { "three MUB verified" } else { "FAIL" });
        return Ok(if ok { PASS } else { VERIFY_FAILED });
    }

    let text = args.generator.as_deref().unwrap_or_default();
    let entries = text
        .split(',')
        .map(|t| parse_mub_entry(t, n))
        .collect::<Result<Vec<_>, _>>()?;
    let g = Generator::with_order(n, entries)?;
    let record = CatalogRecord::mub(
        &g,
        tol,
        provenance(&format!("mub --n {n} --generator {text}")),
    )?;
    println!("C = {g}/√{n}");
    println!(
        "gram {:.3e}  unimodular {:.3e}  F-C bias {:.3e}",
        record.residuals.gram_residual,
        record.residuals.unimodularity_residual,
        record.residuals.diagonal_residual
    );
    println!("three-basis triple (I, F, C) verified");
    emit(&[record], args.out.as_deref(), Format::Jsonl)?;
    Ok(PASS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mub_tokens() {
        let w = parse_mub_entry("w", 3).unwrap();
        assert!((w - unit_root::<f64>(1, 3)).norm() < 1e-15);
        let w2 = parse_mub_entry(" w^2", 3).unwrap();
        assert!((w2 - unit_root::<f64>(2, 3)).norm() < 1e-15);
        assert_eq!(parse_mub_entry("-w", 2).unwrap(), Complex::new(1.0, 0.0));
        assert_eq!(parse_mub_entry("i", 2).unwrap(), Complex::new(0.0, 1.0));
        assert!(parse_mub_entry("wx", 3).is_err());
    }
}
