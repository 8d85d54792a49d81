use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use stabwire::classify::{
    depth_violations, expected_phi_crosstab, left_center_check, parse_report_csv, random_probes,
    stability_check, sweep, CapacityCache, ClassificationReport, EXPECTED_CLASSES,
};
use stabwire::oracle::{contract_cylinder, schmidt_qubits, schmidt_spectrum};
use stabwire::tensor::OrbitTable;
use stabwire::wire::{capacity_with_rule, right_centers};
use stabwire::{capacity, StabilizerTensor, UpdateRule};

use crate::store::{load_or_build, read_checked, write_checked, CachePaths};
use crate::{Cli, Command};

const PROPERTY_DEPTH: usize = 12;
const EXTENDED_GRID: usize = 9;
const RANDOM_ORACLE_CASES: usize = 200;
const RANDOM_DEPTH_PROBES: usize = 1000;
const RANDOM_PAIRS: usize = 100;

pub fn run(cli: &Cli) -> Result<bool> {
    let n_max = cli.n_max as usize;
    let d_max = cli.d_max as usize;
    match &cli.command {
        Command::Enumerate => enumerate(cli),
        Command::Capacity { tensor, n, d } => capacity_cmd(tensor, *n, *d, cli.trace),
        Command::Classify => classify(cli, n_max, d_max),
        Command::Verify { corrupt_for_test } => verify(cli, n_max, d_max, *corrupt_for_test),
        Command::Heatmap { class_id, svg } => heatmap(cli, *class_id, n_max, d_max, *svg),
    }
}

fn table(cli: &Cli) -> Result<OrbitTable> {
    let (table, cached) = load_or_build(&cli.cache_dir)?;
    if cached {
        println!("cached enumeration in {}", cli.cache_dir.display());
    }
    Ok(table)
}

fn representatives(table: &OrbitTable) -> Vec<(usize, StabilizerTensor)> {
    table
        .representative_ordinals()
        .into_iter()
        .map(|o| (o, table.tensors()[o]))
        .collect()
}

fn load_capacities(cli: &Cli) -> CapacityCache {
    read_checked(&CachePaths::new(&cli.cache_dir).capacities)
        .and_then(|body| CapacityCache::from_csv(&body).ok())
        .unwrap_or_default()
}

fn save_capacities(cli: &Cli, cache: &CapacityCache) -> Result<()> {
    write_checked(&CachePaths::new(&cli.cache_dir).capacities, &cache.to_csv())
}

fn write_output(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn enumerate(cli: &Cli) -> Result<bool> {
    let table = table(cli)?;
    println!("lagrangians={} orbits={}", table.len(), table.orbit_count());
    Ok(table.len() == 75_735 && table.orbit_count() == 2649)
}

fn capacity_cmd(path: &Path, n: usize, d: usize, trace: bool) -> Result<bool> {
    if n == 0 || d == 0 {
        bail!("n and d must be positive");
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let tensor = StabilizerTensor::parse_file(&text)
        .with_context(|| format!("invalid tensor in {}", path.display()))?;
    let rule = UpdateRule::for_layer(&tensor, n);
    if trace {
        let phi = rule.phi();
        let show = |ps: &[stabwire::PauliVector]| {
            ps.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!("Z_L: {}", show(&phi.a));
        println!("pairs: {}", phi.p());
        if !phi.a.is_empty() {
            for (depth, front) in right_centers(&rule, d).iter().enumerate() {
                println!("T_R depth {}: {}", depth + 1, show(&front.paulis()));
            }
        }
    }
    println!("C = {}", capacity_with_rule(&rule, d));
    Ok(true)
}

fn print_report(report: &ClassificationReport) {
    for (id, count) in report.census().iter().enumerate() {
        println!(
            "class {id:>2}: {count:>4}  sum={}",
            report.classes[id].sum()
        );
    }
    println!("classes={}", report.class_count());
    for (letter, classes) in report.phi_crosstab() {
        let ids: Vec<String> = classes.iter().map(ToString::to_string).collect();
        println!("phi {letter} -> {}", ids.join(","));
    }
    let omega = report.omega_census();
    println!(
        "omega_classes={} trivial={} split={:?} shared={:?}",
        omega.omega_classes, omega.trivial, omega.split_classes, omega.shared
    );
}

fn classify(cli: &Cli, n_max: usize, d_max: usize) -> Result<bool> {
    let table = table(cli)?;
    let report = sweep(&representatives(&table), n_max, d_max)?;
    write_output(&cli.out, "report.csv", &report.report_csv())?;
    write_output(&cli.out, "census.csv", &report.census_csv())?;

    let mut cache = load_capacities(cli);
    for r in &report.records {
        for n in 1..=n_max {
            for d in 1..=d_max {
                cache.insert(r.canonical_ordinal, n, d, r.signature.get(n, d));
            }
        }
    }
    save_capacities(cli, &cache)?;

    print_report(&report);
    if (n_max, d_max) != (6, 6) {
        println!("note: class count and cross-tab are only checked on the 6 x 6 grid");
        return Ok(true);
    }
    let mut ok = true;
    if let Err(err) = report.check_class_count(EXPECTED_CLASSES) {
        println!("FAIL: {err}");
        for (id, s) in report.classes.iter().enumerate() {
            println!("class {id}:\n{s}");
        }
        ok = false;
    }
    if report.phi_crosstab() != expected_phi_crosstab() {
        println!(
            "FAIL: phi cross-tab differs from {:?}",
            expected_phi_crosstab()
        );
        ok = false;
    }
    Ok(ok)
}

struct Suite {
    name: &'static str,
    checked: usize,
    witness: Option<String>,
}

fn oracle_suite(
    report: &ClassificationReport,
    table: &OrbitTable,
    seed: u64,
    corrupt: bool,
) -> Suite {
    use rand::{Rng, SeedableRng};
    let mut cases: Vec<(StabilizerTensor, usize, usize)> = Vec::new();
    for class in 0..report.class_count() {
        let rep = report.representative(class).expect("nonempty").tensor;
        cases.extend((1..=4).flat_map(|n| (1..=4).map(move |d| (rep, n, d))));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_ORACLE_CASES {
        let t = table.tensors()[rng.random_range(0..table.len())];
        cases.push((t, rng.random_range(1..=3), rng.random_range(1..=3)));
    }
    let witness = cases
        .par_iter()
        .filter_map(|&(t, n, d)| {
            let edge = contract_cylinder(&t, n, d);
            let dense = schmidt_qubits(&edge);
            let chain = capacity(&t, n, d) + usize::from(corrupt);
            let flat = schmidt_spectrum(&edge).is_flat();
            (dense != chain || !flat).then(|| {
                format!(
                    "tensor {t} n={n} d={d}: dense {dense}, chain {chain}, flat spectrum {flat}"
                )
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .next();
    Suite {
        name: "oracle",
        checked: cases.len(),
        witness,
    }
}

fn verify(cli: &Cli, n_max: usize, d_max: usize, corrupt: bool) -> Result<bool> {
    let table = table(cli)?;
    let reps = representatives(&table);
    let report = sweep(&reps, n_max, d_max)?;
    let mut suites = vec![oracle_suite(&report, &table, cli.seed, corrupt)];

    let mut probes: Vec<(StabilizerTensor, usize)> = reps
        .iter()
        .flat_map(|&(_, t)| (1..=n_max).map(move |n| (t, n)))
        .collect();
    probes.extend(random_probes(
        table.tensors(),
        RANDOM_DEPTH_PROBES,
        8,
        cli.seed,
    ));
    let violations: Vec<String> = probes
        .par_iter()
        .flat_map_iter(|&(t, n)| depth_violations(&t, n, PROPERTY_DEPTH, d_max))
        .map(|v| v.to_string())
        .collect();
    suites.push(Suite {
        name: "depth",
        checked: probes.len(),
        witness: violations.into_iter().next(),
    });

    let mut cache = load_capacities(cli);
    let stability = stability_check(
        &report,
        &mut cache,
        EXTENDED_GRID,
        EXTENDED_GRID,
        RANDOM_PAIRS,
        cli.seed,
    );
    save_capacities(cli, &cache)?;
    suites.push(Suite {
        name: "stability",
        checked: stability.pairs_checked,
        witness: stability.disagreements.first().map(ToString::to_string),
    });

    let centers = left_center_check(&reps.iter().map(|&(_, t)| t).collect::<Vec<_>>());
    let mut witness = centers
        .iter()
        .find(|v| !v.passed())
        .map(|v| format!("standard row {} unmatched", v.row));
    if (n_max, d_max) == (6, 6) && report.phi_crosstab() != expected_phi_crosstab() {
        witness.get_or_insert_with(|| format!("phi cross-tab {:?}", report.phi_crosstab()));
    }
    suites.push(Suite {
        name: "standard-forms",
        checked: centers.len() + 1,
        witness,
    });

    let mut ok = true;
    for s in &suites {
        match &s.witness {
            None => println!("suite {}: PASS ({} checks)", s.name, s.checked),
            Some(w) => {
                println!(
                    "suite {}: FAIL ({} checks) first counterexample: {w}",
                    s.name, s.checked
                );
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn text_grid(grid: &[usize], n_max: usize, d_max: usize) -> String {
    let mut out = String::from("n\\d");
    for d in 1..=d_max {
        write!(out, "{d:>3}").unwrap();
    }
    out.push('\n');
    for n in 1..=n_max {
        write!(out, "{n:>3}").unwrap();
        for d in 1..=d_max {
            write!(out, "{:>3}", grid[(n - 1) * d_max + d - 1]).unwrap();
        }
        out.push('\n');
    }
    out
}

fn svg_grid(grid: &[usize], n_max: usize, d_max: usize, class_id: usize) -> String {
    const CELL: usize = 28;
    const MARGIN: usize = 30;
    let width = MARGIN + CELL * d_max + 10;
    let height = MARGIN + CELL * n_max + 10;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"monospace\" font-size=\"11\">\n<title>class {class_id}</title>\n"
    );
    for d in 1..=d_max {
        let x = MARGIN + (d - 1) * CELL + CELL / 2;
        writeln!(
            out,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{d}</text>",
            MARGIN - 8
        )
        .unwrap();
    }
    for n in 1..=n_max {
        let y = MARGIN + (n - 1) * CELL;
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{n}</text>",
            MARGIN - 6,
            y + CELL / 2 + 4
        )
        .unwrap();
        for d in 1..=d_max {
            let c = grid[(n - 1) * d_max + d - 1];
            let x = MARGIN + (d - 1) * CELL;
            let shade = 255 - (200 * c / n_max.max(1)) as u8;
            writeln!(
                out,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"rgb({shade},{shade},255)\" stroke=\"#888\"/><text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{c}</text>",
                x + CELL / 2,
                y + CELL / 2 + 4
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

fn heatmap(cli: &Cli, class_id: usize, n_max: usize, d_max: usize, svg: bool) -> Result<bool> {
    let report_path = cli.out.join("report.csv");
    let text = fs::read_to_string(&report_path)
        .with_context(|| format!("reading {}; run `classify` first", report_path.display()))?;
    let rows = parse_report_csv(&text)?;
    let Some(row) = rows.iter().find(|r| r.transmission_class == class_id) else {
        bail!("unknown class id {class_id}");
    };
    let table = table(cli)?;
    let tensor = *table
        .tensors()
        .get(row.canonical_ordinal)
        .context("report ordinal is outside the enumeration")?;
    let mut cache = load_capacities(cli);
    cache.fill(&[(row.canonical_ordinal, tensor)], n_max, d_max);
    save_capacities(cli, &cache)?;
    let grid = cache
        .grid(row.canonical_ordinal, n_max, d_max)
        .expect("filled");

    let mut csv = String::from("n,d,capacity\n");
    for n in 1..=n_max {
        for d in 1..=d_max {
            writeln!(csv, "{n},{d},{}", grid[(n - 1) * d_max + d - 1]).unwrap();
        }
    }
    write_output(&cli.out, &format!("heatmap-class{class_id}.csv"), &csv)?;
    if svg {
        write_output(
            &cli.out,
            &format!("heatmap-class{class_id}.svg"),
            &svg_grid(&grid, n_max, d_max, class_id),
        )?;
    }
    println!(
        "class {class_id} (representative {})",
        row.canonical_ordinal
    );
    print!("{}", text_grid(&grid, n_max, d_max));
    Ok(true)
}
