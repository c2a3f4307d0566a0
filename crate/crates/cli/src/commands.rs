use std::error::Error as StdError;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use divmon_core::{
    census, divisor_lattice, full_suite, is_garside, local_delta, quasi_center, validate_with_budget, CensusOptions,
    ClassBudget, Element, Engine, FiniteLattice, HasseFormat, LocalDeltaOutcome, Monoid, QuadraticPresentation,
    SamplingPlan,
};
use serde_json::{json, Value};

use crate::{Cli, Command};

type CliResult = Result<ExitCode, Box<dyn StdError>>;

const NEGATIVE: u8 = 1;

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NEGATIVE)
    }
}

fn budget(cli: &Cli) -> ClassBudget {
    let mut budget = ClassBudget::default();
    if let Some(n) = cli.budget_class {
        budget.max_class_size = n;
    }
    budget
}

fn read_presentation(cli: &Cli, file: Option<&Path>) -> Result<QuadraticPresentation, Box<dyn StdError>> {
    let text = match (file.or(cli.presentation.as_deref()), &cli.inline) {
        (Some(path), None) => {
            fs::read_to_string(path).map_err(|e| format!("cannot read `{}`: {e}", path.display()))?
        }
        (None, Some(inline)) => inline.replace(';', "\n"),
        (Some(_), Some(_)) => return Err("give either a presentation file or --inline, not both".into()),
        (None, None) => return Err("no presentation given; use --presentation FILE or --inline TEXT".into()),
    };
    Ok(QuadraticPresentation::parse(&text)?)
}

fn load_monoid(cli: &Cli) -> Result<Monoid, Box<dyn StdError>> {
    let p = read_presentation(cli, None)?;
    if cli.unchecked {
        return Ok(Monoid::with_budget(p, budget(cli)));
    }
    let report = validate_with_budget(&p, budget(cli));
    if !report.accepted() {
        let first = &report.violations[0];
        return Err(format!(
            "not a divisibility monoid ({} at {}); pass --unchecked to use the enumeration engine anyway",
            first.condition,
            first.witness.join(", ")
        )
        .into());
    }
    Ok(Monoid::with_budget(p, budget(cli)).with_engine(Engine::Reversing)?)
}

fn print_value(text: String, value: Value, cli: &Cli) -> Result<(), Box<dyn StdError>> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("{text}");
    }
    Ok(())
}

fn optional(m: &Monoid, e: &Option<Element>) -> Value {
    e.as_ref().map_or(Value::Null, |e| Value::String(m.render(e)))
}

fn render_optional(m: &Monoid, e: &Option<Element>) -> String {
    e.as_ref().map_or_else(|| "none".to_string(), |e| m.render(e))
}

pub fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Validate { file } => validate(cli, file.as_deref()),
        Command::Nf { word } => {
            let m = load_monoid(cli)?;
            let e = m.parse_element(word)?;
            print_value(m.render(&e), json!({ "normal_form": m.render(&e) }), cli)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Eq { a, b } => {
            let m = load_monoid(cli)?;
            let same = m.parse_element(a)? == m.parse_element(b)?;
            print_value(same.to_string(), json!({ "equal": same }), cli)?;
            Ok(verdict(same))
        }
        Command::Mul { words } => {
            let m = load_monoid(cli)?;
            let factors = words.iter().map(|w| m.parse_element(w)).collect::<Result<Vec<_>, _>>()?;
            let product = m.product(&factors)?;
            print_value(m.render(&product), json!({ "product": m.render(&product) }), cli)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lcm { a, b } => binary(cli, a, b, "lcm", |m, a, b| m.right_lcm(a, b)),
        Command::Residue { a, b } => binary(cli, a, b, "residue", |m, a, b| m.residue(a, b)),
        Command::Gcd { a, b } => binary(cli, a, b, "gcd", |m, a, b| m.left_gcd(a, b).map(Some)),
        Command::Divisors { word, right } => {
            let m = load_monoid(cli)?;
            let a = m.parse_element(word)?;
            let set = if *right { m.right_divisors(&a)? } else { m.left_divisors(&a)? };
            let names: Vec<String> = set.iter().map(|d| m.render(d)).collect();
            print_value(names.join("\n"), json!({ "element": m.render(&a), "divisors": names }), cli)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lattice { word } => lattice(cli, word),
        Command::Delta { word } => delta(cli, word.as_deref()),
        Command::Quasicenter => quasicenter(cli),
        Command::Garside => garside(cli),
        Command::Census { rank, dump } => run_census(cli, *rank, dump.as_deref()),
        Command::Hypercube { file } => hypercube(cli, file),
        Command::Check { samples } => check(cli, *samples),
    }
}

fn validate(cli: &Cli, file: Option<&Path>) -> CliResult {
    let p = read_presentation(cli, file)?;
    let report = validate_with_budget(&p, budget(cli));
    let mut text = if report.accepted() { "accepted".to_string() } else { "rejected".to_string() };
    for v in &report.violations {
        text.push_str(&format!("\n  [{}] {}: {}", v.condition, v.witness.join(", "), v.message));
    }
    print_value(text, serde_json::to_value(&report)?, cli)?;
    Ok(verdict(report.accepted()))
}

fn binary(
    cli: &Cli,
    a: &str,
    b: &str,
    key: &str,
    op: impl Fn(&Monoid, &Element, &Element) -> divmon_core::Result<Option<Element>>,
) -> CliResult {
    let m = load_monoid(cli)?;
    let (a, b) = (m.parse_element(a)?, m.parse_element(b)?);
    let result = op(&m, &a, &b)?;
    print_value(render_optional(&m, &result), json!({ key: optional(&m, &result) }), cli)?;
    Ok(ExitCode::SUCCESS)
}

fn lattice(cli: &Cli, word: &str) -> CliResult {
    let m = load_monoid(cli)?;
    let a = m.parse_element(word)?;
    let lattice = divisor_lattice(&m, &a)?;
    if cli.dot {
        print!("{}", lattice.export_hasse(HasseFormat::Dot)?);
    } else if cli.json {
        println!("{}", lattice.export_hasse(HasseFormat::Json)?);
    } else {
        let finite = lattice.to_finite_lattice()?;
        println!("elements: {}", lattice.names().join(", "));
        println!("height: {}", finite.height());
        println!("distributive lattice: {}", finite.is_distributive());
        println!("hypercube: {}", finite.is_hypercube());
        for c in lattice.covers() {
            println!(
                "{} -> {} ({})",
                lattice.names()[c.lower],
                lattice.names()[c.upper],
                m.presentation().alphabet().name(c.generator)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn delta_json(m: &Monoid, name: String, outcome: &LocalDeltaOutcome) -> Value {
    let stages: Vec<Vec<String>> = outcome
        .trace
        .stages
        .iter()
        .map(|s| s.iter().map(|e| m.render(e)).collect())
        .collect();
    json!({
        "element": name,
        "exists": outcome.exists(),
        "delta": optional(m, &outcome.delta),
        "stages": stages,
        "failure": outcome.trace.failure.as_ref().map(|f| json!({ "c": m.render(&f.c), "b": m.render(&f.b) })),
    })
}

fn delta_text(m: &Monoid, name: &str, outcome: &LocalDeltaOutcome) -> String {
    let mut out = format!("delta({name}) = {}", render_optional(m, &outcome.delta));
    for (i, stage) in outcome.trace.stages.iter().enumerate() {
        let members: Vec<String> = stage.iter().map(|e| m.render(e)).collect();
        out.push_str(&format!("\n  stage {i}: {{{}}}", members.join(", ")));
    }
    if let Some(f) = &outcome.trace.failure {
        out.push_str(&format!("\n  missing residue: {}\\{}", m.render(&f.c), m.render(&f.b)));
    }
    out
}

fn delta(cli: &Cli, word: Option<&str>) -> CliResult {
    let m = load_monoid(cli)?;
    let targets = match word {
        Some(w) => vec![m.parse_element(w)?],
        None => m.generators(),
    };
    let mut texts = Vec::new();
    let mut values = Vec::new();
    for a in &targets {
        let name = m.render(a);
        let outcome = local_delta(&m, a)?;
        texts.push(delta_text(&m, &name, &outcome));
        values.push(delta_json(&m, name, &outcome));
    }
    print_value(texts.join("\n"), Value::Array(values), cli)?;
    Ok(ExitCode::SUCCESS)
}

fn quasicenter(cli: &Cli) -> CliResult {
    let m = load_monoid(cli)?;
    let qc = quasi_center(&m)?;
    let generators: Vec<String> = qc.generators.iter().map(|g| m.render(g)).collect();
    let mut text = format!("rank: {}\ngenerators: {{{}}}", qc.rank(), generators.join(", "));
    let mut map = serde_json::Map::new();
    for (x, d) in m.generators().iter().zip(&qc.generator_map) {
        text.push_str(&format!("\ndelta({}) = {}", m.render(x), render_optional(&m, d)));
        map.insert(m.render(x), optional(&m, d));
    }
    print_value(text, json!({ "rank": qc.rank(), "generators": generators, "deltas": map }), cli)?;
    Ok(ExitCode::SUCCESS)
}

fn garside(cli: &Cli) -> CliResult {
    let m = load_monoid(cli)?;
    let report = is_garside(&m)?;
    let alphabet = m.presentation().alphabet();
    let witness = report.witness.map(|(a, b)| [alphabet.name(a).to_string(), alphabet.name(b).to_string()]);
    if cli.dot {
        return match &report.simple_lattice {
            Some(l) => {
                print!("{}", l.export_hasse(HasseFormat::Dot)?);
                Ok(ExitCode::SUCCESS)
            }
            None => Err("monoid is not Garside; no simple-element lattice to draw".into()),
        };
    }
    let size = report.simple_lattice.as_ref().map(|l| l.len());
    let mut text = format!("garside: {}", if report.is_garside { "yes" } else { "no" });
    if let Some([a, b]) = &witness {
        text.push_str(&format!("\nwitness: {a} and {b} have no common right multiple"));
    }
    if let Some(d) = &report.delta {
        text.push_str(&format!("\ndelta: {}", m.render(d)));
    }
    if let Some(s) = size {
        text.push_str(&format!("\nsimple elements: {s}"));
    }
    if let Some(h) = report.hypercube {
        text.push_str(&format!("\nhypercube: {h}"));
    }
    let value = json!({
        "is_garside": report.is_garside,
        "witness": witness,
        "delta": optional(&m, &report.delta),
        "simple_lattice_size": size,
        "hypercube": report.hypercube,
    });
    print_value(text, value, cli)?;
    Ok(ExitCode::SUCCESS)
}

fn run_census(cli: &Cli, rank: usize, dump: Option<&Path>) -> CliResult {
    let options = CensusOptions {
        workers: cli.workers,
        time_budget: cli.budget_time.map(Duration::from_secs).or(CensusOptions::default().time_budget),
        class_budget: budget(cli),
        ..CensusOptions::default()
    };
    let report = census(rank, &options)?;
    if let Some(dir) = dump {
        report.dump(dir, options.class_budget)?;
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.to_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn hypercube(cli: &Cli, file: &Path) -> CliResult {
    let text = fs::read_to_string(file).map_err(|e| format!("cannot read `{}`: {e}", file.display()))?;
    let lattice = FiniteLattice::from_json(&text)?;
    let mut reasons = Vec::new();
    if lattice.bottom().is_none() {
        reasons.push("no unique bottom".to_string());
    }
    if lattice.top().is_none() {
        reasons.push("no unique top".to_string());
    }
    if let Some(missing) = lattice.lattice_failure() {
        reasons.push(format!(
            "`{}` and `{}` have no {}",
            lattice.id(missing.a),
            lattice.id(missing.b),
            missing.kind
        ));
    }
    let is_cube = lattice.is_hypercube();
    if reasons.is_empty() && !is_cube {
        reasons.push(format!(
            "{} elements over {} atoms is not a Boolean lattice",
            lattice.len(),
            lattice.atoms().len()
        ));
    }
    let mut text = is_cube.to_string();
    for r in &reasons {
        text.push_str(&format!("\n  {r}"));
    }
    let value = json!({
        "hypercube": is_cube,
        "elements": lattice.len(),
        "atoms": lattice.atoms().len(),
        "reasons": reasons,
    });
    print_value(text, value, cli)?;
    Ok(verdict(is_cube))
}

fn check(cli: &Cli, samples: usize) -> CliResult {
    let m = load_monoid(cli)?;
    let plan = SamplingPlan {
        seed: cli.seed,
        random_products: samples,
        ..SamplingPlan::default()
    };
    let report = if m.engine() == Engine::Reversing {
        full_suite(&m, &plan)?
    } else {
        divmon_core::run_checks(&m, &SamplingPlan::short().with_seed(cli.seed))?
    };
    let mut text = format!(
        "presentation: {}\npool: {}\nchecks: {}\nviolations: {}",
        report.presentation,
        report.pool_size,
        report.checked.values().sum::<usize>(),
        report.violations.len()
    );
    for v in &report.violations {
        text.push_str(&format!("\n  [{}] {}: {}", v.property, v.witness.join(", "), v.detail));
    }
    print_value(text, serde_json::to_value(&report)?, cli)?;
    Ok(verdict(report.passed()))
}
