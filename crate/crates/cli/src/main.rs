//! Command-line front end: field invariants, ideal arithmetic, K3 class
//! group orders, kept-ideal enumeration, Brauer-group supersets, the
//! Hilbert-class-field classifier, lattice round-trips and the built-in
//! known-answer suite.

mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};
use std::process::ExitCode;

use k3brauer::brauer::{brauer_superset, hilbert_brauer_set, BrauerCatalog};
use k3brauer::enumerate::{enumerate_kept, EnumerateOptions};
use k3brauer::ideal::{
    abelian_invariants, euler_phi, is_principal, rational_intersection, ray_class_number,
    to_zbasis, unit_residue_index,
};
use k3brauer::k3::{k3_base_order, k3_order_with_bound, H1Bound, K3OrderEstimate, DEFAULT_RESIDUE_BOUND};
use k3brauer::lattice::{equivalent, gram, is_integral_lattice, scale, IdealLatticeLS};
use k3brauer::literal::{format_lattice, parse_element, parse_ideal, parse_lattice};
use k3brauer::{Error, FactoredIdeal, ImQuadField, K3OrderEstimate as Estimate};

#[derive(Parser)]
#[command(
    name = "k3brauer",
    version,
    about = "Exact arithmetic for K3 class groups and fixed Brauer groups over imaginary quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Emit Markdown tables instead of text
    #[arg(long, global = true)]
    md: bool,

    /// Ideal-norm bound for hilbert-brauer; residue-enumeration ceiling elsewhere
    #[arg(long, global = true)]
    norm_bound: Option<u64>,

    /// Ceiling for the exponent of a ramified 2 during enumeration
    #[arg(long, global = true)]
    two_exp_cap: Option<u32>,

    /// Accept enumeration reports without a completeness certificate
    #[arg(long, global = true)]
    force_uncertified: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the invariants of Q(sqrt(d))
    FieldInfo {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
    },
    /// Splitting behaviour of a rational prime
    Splitting {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        p: u64,
    },
    /// Arithmetic on factored ideals
    IdealOp {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        op: IdealOp,
        a: String,
        b: Option<String>,
    },
    /// K3 class group order data for one ideal
    GOrder {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        ideal: String,
    },
    /// All ambiguous ideals whose K3 order divides n
    Enumerate {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        #[arg(short)]
        n: u64,
    },
    /// The superset of possible fixed Brauer groups at degree n
    Brauer {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        #[arg(short)]
        n: u64,
    },
    /// Ideals passing the Hilbert-class-field criterion
    HilbertBrauer {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
    },
    /// Inspect an ideal lattice with level structure
    Lattice {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        literal: String,
        /// Scale the lattice by a field element, e.g. "1+1*w"
        #[arg(long)]
        scale: Option<String>,
        /// Test equivalence against another lattice literal
        #[arg(long)]
        equiv: Option<String>,
    },
    /// Run the built-in known-answer suite and diff against the embedded tables
    VerifyPaper,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdealOp {
    Mul,
    Inv,
    Conj,
    Gcd,
    Lcm,
    Divides,
    Norm,
    Zbasis,
    Phi,
    IntersectZ,
    UnitIndex,
    Invariants,
    RayClass,
    Principal,
    Ambiguous,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BoundExceeded(_) | Error::Uncertified(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::FieldInfo { d } => field_info(cli, *d),
        Command::Splitting { d, p } => splitting(cli, *d, *p),
        Command::IdealOp { d, op, a, b } => ideal_op(cli, *d, *op, a, b.as_deref()),
        Command::GOrder { d, ideal } => g_order(cli, *d, ideal),
        Command::Enumerate { d, n } => enumerate(cli, *d, *n),
        Command::Brauer { d, n } => brauer(cli, *d, *n),
        Command::HilbertBrauer { d } => hilbert(cli, *d),
        Command::Lattice {
            d,
            literal,
            scale,
            equiv,
        } => lattice(cli, *d, literal, scale.as_deref(), equiv.as_deref()),
        Command::VerifyPaper => Ok(verify_paper()),
    }
}

fn residue_bound(cli: &Cli) -> u64 {
    cli.norm_bound.unwrap_or(DEFAULT_RESIDUE_BOUND)
}

fn emit(cli: &Cli, value: Value, text: String) -> Result<ExitCode, Error> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        print!("{text}");
    }
    Ok(ExitCode::SUCCESS)
}

fn field_info(cli: &Cli, d: i64) -> Result<ExitCode, Error> {
    let field = ImQuadField::new(d)?;
    let base = k3_base_order(&field)?;
    let value = json!({
        "schema": 1,
        "command": "field-info",
        "d": field.d(),
        "discriminant": field.discriminant(),
        "omega": if field.d().rem_euclid(4) == 1 { "(1+sqrt(d))/2" } else { "sqrt(d)" },
        "ramified_primes": field.ramified_primes(),
        "mu_order": field.mu_order(),
        "class_number": field.class_number(),
        "different": field.different().to_string(),
        "k3_base_order": base.to_string(),
    });
    let text = format!(
        "Q(sqrt({})), discriminant {}\n\
         integral basis: 1, w = {}\n\
         ramified primes: {:?}\n\
         roots of unity: {}\n\
         class number: {}\n\
         different: {}\n\
         K3 base order: {}\n",
        field.d(),
        field.discriminant(),
        if field.d().rem_euclid(4) == 1 {
            "(1+sqrt(d))/2"
        } else {
            "sqrt(d)"
        },
        field.ramified_primes(),
        field.mu_order(),
        field.class_number(),
        field.different(),
        base
    );
    emit(cli, value, text)
}

fn splitting(cli: &Cli, d: i64, p: u64) -> Result<ExitCode, Error> {
    let field = ImQuadField::new(d)?;
    let t = field.splitting_type(p)?;
    let value = json!({
        "schema": 1,
        "command": "splitting",
        "d": d,
        "p": p,
        "type": t.to_string(),
    });
    emit(cli, value, format!("{t}\n"))
}

fn ideal_op(cli: &Cli, d: i64, op: IdealOp, a: &str, b: Option<&str>) -> Result<ExitCode, Error> {
    let field = ImQuadField::new(d)?;
    let lhs = parse_ideal(&field, a)?;
    let rhs = |name: &str| -> Result<FactoredIdeal, Error> {
        let raw = b.ok_or_else(|| Error::Validation(format!("'{name}' needs two ideals")))?;
        parse_ideal(&field, raw)
    };
    let (key, value): (&str, Value) = match op {
        IdealOp::Mul => ("product", Value::String(lhs.mul(&rhs("mul")?).to_string())),
        IdealOp::Inv => ("inverse", Value::String(lhs.inv().to_string())),
        IdealOp::Conj => ("conjugate", Value::String(lhs.conj().to_string())),
        IdealOp::Gcd => ("gcd", Value::String(lhs.gcd(&rhs("gcd")?).to_string())),
        IdealOp::Lcm => ("lcm", Value::String(lhs.lcm(&rhs("lcm")?).to_string())),
        IdealOp::Divides => ("divides", Value::Bool(lhs.divides(&rhs("divides")?))),
        IdealOp::Norm => ("norm", Value::String(lhs.norm().to_string())),
        IdealOp::Zbasis => {
            let zb = to_zbasis(&field, &lhs);
            (
                "zbasis",
                json!({ "a": zb.a().to_string(), "b": zb.b().to_string(), "c": zb.c().to_string() }),
            )
        }
        IdealOp::Phi => ("phi", Value::String(euler_phi(&lhs)?.to_string())),
        IdealOp::IntersectZ => (
            "intersect_z",
            Value::String(rational_intersection(&lhs)?.to_string()),
        ),
        IdealOp::UnitIndex => (
            "unit_index",
            Value::from(unit_residue_index(&field, &lhs)?),
        ),
        IdealOp::Invariants => (
            "invariants",
            json!(abelian_invariants(&lhs)?
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()),
        ),
        IdealOp::RayClass => (
            "ray_class_number",
            Value::String(ray_class_number(&field, &lhs)?.to_string()),
        ),
        IdealOp::Principal => match is_principal(&field, &lhs) {
            Some(g) => ("generator", Value::String(g.to_string())),
            None => ("generator", Value::Null),
        },
        IdealOp::Ambiguous => ("ambiguous", Value::Bool(lhs.is_ambiguous())),
    };
    let value_text = match &value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let out = json!({
        "schema": 1,
        "command": "ideal-op",
        "d": d,
        "input": lhs.to_string(),
        key: value,
    });
    emit(cli, out, format!("{key}: {value_text}\n"))
}

fn estimate_json(est: &Estimate) -> Value {
    json!({
        "ideal": est.ideal.to_string(),
        "norm": est.ideal.norm().to_string(),
        "A": est.numerator_a.to_string(),
        "h1_exact": est.h1.is_exact(),
        "h1_upper": est.h1.upper(),
        "possible_orders": est.possible_orders.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "J": est.rational_j.to_string(),
        "e_factor": est.e_factor,
        "phi_E": est.phi_e.to_string(),
        "phi_J": est.phi_j.to_string(),
        "unit_index": est.unit_index,
    })
}

fn estimate_text(est: &K3OrderEstimate) -> String {
    let h1 = match &est.h1 {
        H1Bound::Exact1 => "exact 1".to_string(),
        H1Bound::Upper {
            bound,
            invariant_unit_index,
        } => format!("upper bound {bound} (invariant-unit index {invariant_unit_index})"),
    };
    let orders = est
        .possible_orders
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "ideal: {} (norm {})\n\
         A = {}  [phi_E = {}, J = {}, phi(J) = {}, unit index = {}, e-factor = {}]\n\
         H^1: {}\n\
         possible orders: {{{}}}\n",
        est.ideal,
        est.ideal.norm(),
        est.numerator_a,
        est.phi_e,
        est.rational_j,
        est.phi_j,
        est.unit_index,
        est.e_factor,
        h1,
        orders
    )
}

fn g_order(cli: &Cli, d: i64, literal: &str) -> Result<ExitCode, Error> {
    let field = ImQuadField::new(d)?;
    let ideal = parse_ideal(&field, literal)?;
    let est = k3_order_with_bound(&field, &ideal, residue_bound(cli))?;
    let mut value = estimate_json(&est);
    value["schema"] = json!(1);
    value["command"] = json!("g-order");
    value["d"] = json!(d);
    if let Some(order) = est.exact_order() {
        value["order"] = json!(order.to_string());
    }
    let mut text = estimate_text(&est);
    if let Some(order) = est.exact_order() {
        text.push_str(&format!("order: {order}\n"));
    }
    emit(cli, value, text)
}

fn enum_options(cli: &Cli) -> EnumerateOptions {
    EnumerateOptions {
        two_exp_cap: cli.two_exp_cap,
        residue_bound: residue_bound(cli),
        prime_exp_caps: Default::default(),
    }
}

fn enumerate(cli: &Cli, d: i64, n: u64) -> Result<ExitCode, Error> {
    let field = ImQuadField::new(d)?;
    let report = enumerate_kept(&field, n, &enum_options(cli))?;
    let value = json!({
        "schema": 1,
        "command": "enumerate",
        "d": d,
        "n": n,
        "certified": report.certified(),
        "cap_saturated": report.cap_saturated,
        "uncertified_reasons": report.uncertified_reasons,
        "prime_caps": report.prime_caps,
        "kept": report.kept.iter().map(estimate_json).collect::<Vec<_>>(),
    });
    let mut text = format!(
        "kept ideals for d = {d}, n = {n} ({} total, {})\n",
        report.kept.len(),
        if report.certified() {
            "certified complete"
        } else {
            "NOT certified"
        }
    );
    for est in &report.kept {
        let orders = est
            .possible_orders
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        text.push_str(&format!(
            "  {:<16} norm {:<6} A = {:<4} orders {{{}}}\n",
            est.ideal.to_string(),
            est.ideal.norm().to_string(),
            est.numerator_a.to_string(),
            orders
        ));
    }
    if !report.certified() && !cli.force_uncertified {
        if cli.json {
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        } else {
            print!("{text}");
        }
        eprintln!("enumeration is not certified complete; rerun with raised ceilings or --force-uncertified");
        return Ok(ExitCode::from(2));
    }
    emit(cli, value, text)
}

fn brauer(cli: &Cli, d: i64, n: u64) -> Result<ExitCode, Error> {
    let field = ImQuadField::new(d)?;
    let report = enumerate_kept(&field, n, &enum_options(cli))?;
    let catalog = brauer_superset(&report, cli.force_uncertified)?;
    let value = json!({
        "schema": 1,
        "command": "brauer",
        "d": d,
        "n": n,
        "certified": report.certified(),
        "kept": report.kept.iter().map(|e| e.ideal.to_string()).collect::<Vec<_>>(),
        "groups": catalog.group_labels(),
        "entries": catalog.entries.iter().map(|e| json!({
            "ideal": e.ideal.to_string(),
            "norm": e.norm.to_string(),
            "invariants": e.invariants.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "group": BrauerCatalog::group_label(&e.invariants),
            "witnesses": e.witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    let text = if cli.md {
        brauer_markdown(&report.kept, &catalog)
    } else {
        let mut t = format!(
            "possible fixed Brauer groups for d = {d}, n = {n} ({} distinct)\n",
            catalog.distinct_groups.len()
        );
        for g in catalog.group_labels() {
            t.push_str(&format!("  {g}\n"));
        }
        t
    };
    emit(cli, value, text)
}

fn brauer_markdown(kept: &[K3OrderEstimate], catalog: &BrauerCatalog) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "## Kept ambiguous ideals (d = {}, n = {})\n\n",
        catalog.field_d, catalog.n
    ));
    out.push_str("| Ideal | Norm | A | Possible orders |\n|---|---|---|---|\n");
    for est in kept {
        let orders = est
            .possible_orders
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            est.ideal,
            est.ideal.norm(),
            est.numerator_a,
            orders
        ));
    }
    out.push_str("\n## Possible fixed Brauer groups\n\n| Group | Order |\n|---|---|\n");
    for g in &catalog.distinct_groups {
        let order: BigInt = g.iter().product();
        out.push_str(&format!(
            "| {} | {} |\n",
            BrauerCatalog::group_label(g),
            order
        ));
    }
    out
}

fn hilbert(cli: &Cli, d: i64) -> Result<ExitCode, Error> {
    let field = ImQuadField::new(d)?;
    let bound = cli.norm_bound.unwrap_or(50);
    let entries = hilbert_brauer_set(&field, bound, DEFAULT_RESIDUE_BOUND)?;
    let value = json!({
        "schema": 1,
        "command": "hilbert-brauer",
        "d": d,
        "norm_bound": bound,
        "entries": entries.iter().map(|e| json!({
            "ideal": e.ideal.to_string(),
            "group": BrauerCatalog::group_label(&e.invariants),
        })).collect::<Vec<_>>(),
    });
    let mut text = format!(
        "ideals of norm <= {bound} (up to conjugation) passing the Hilbert-class-field criterion for d = {d}\n"
    );
    for e in &entries {
        text.push_str(&format!(
            "  {:<16} {}\n",
            e.ideal.to_string(),
            BrauerCatalog::group_label(&e.invariants)
        ));
    }
    emit(cli, value, text)
}

fn lattice(
    cli: &Cli,
    d: i64,
    literal: &str,
    scale_by: Option<&str>,
    equiv_to: Option<&str>,
) -> Result<ExitCode, Error> {
    let field = ImQuadField::new(d)?;
    let parsed = parse_lattice(&field, literal)?;
    let ls = IdealLatticeLS::new(&field, parsed.ideal, parsed.alpha, parsed.level)?;
    let g = gram(&field, &ls.ideal, &ls.alpha)?;
    let dual = ls.dual(&field)?;
    let level_ideal = ls.level_ideal(&field)?;
    let invariants = abelian_invariants(&level_ideal)?;
    let integral = is_integral_lattice(&field, &ls.ideal, &ls.alpha)?;

    let mut value = json!({
        "schema": 1,
        "command": "lattice",
        "d": d,
        "literal": format_lattice(&ls.ideal, &ls.alpha, &ls.level),
        "integral": integral,
        "gram": g.entries.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "dual": dual.to_string(),
        "level_ideal": level_ideal.to_string(),
        "level_group": BrauerCatalog::group_label(&invariants),
    });
    let mut text = format!(
        "lattice: {}\n\
         integral: {}\n\
         gram: [[{}, {}], [{}, {}]]\n\
         dual: {}\n\
         level ideal I_B: {} (group {})\n",
        format_lattice(&ls.ideal, &ls.alpha, &ls.level),
        integral,
        g.entries[0][0],
        g.entries[0][1],
        g.entries[1][0],
        g.entries[1][1],
        dual,
        level_ideal,
        BrauerCatalog::group_label(&invariants),
    );

    if let Some(raw) = scale_by {
        let e = parse_element(raw)?;
        let scaled = scale(&field, &e, &ls)?;
        let lit = format_lattice(&scaled.ideal, &scaled.alpha, &scaled.level);
        value["scaled"] = json!(lit);
        text.push_str(&format!("scaled by {e}: {lit}\n"));
    }
    if let Some(raw) = equiv_to {
        let other = parse_lattice(&field, raw)?;
        let other = IdealLatticeLS::new(&field, other.ideal, other.alpha, other.level)?;
        match equivalent(&field, &ls, &other) {
            Some(e) => {
                value["equivalent"] = json!(e.to_string());
                text.push_str(&format!("equivalent via e = {e}\n"));
            }
            None => {
                value["equivalent"] = Value::Null;
                text.push_str("not equivalent\n");
            }
        }
    }
    emit(cli, value, text)
}

fn verify_paper() -> ExitCode {
    let checks = verify::run_all();
    let mut ok = true;
    for c in &checks {
        if c.pass {
            println!("PASS  {}", c.name);
        } else {
            ok = false;
            println!("FAIL  {}: {}", c.name, c.detail);
        }
    }
    println!(
        "{} of {} checks passed",
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    );
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
