use std::time::Instant;

use floor_diagrams::enumeration::{DiagramCache, DiagramQuery, Filter};
use floor_diagrams::invariants::{gw, relative_gw, severi, welschinger};
use floor_diagrams::markings::{brute_force_markings, count_relative_markings, list_markings, Marking};
use floor_diagrams::model::max_genus;
use floor_diagrams::nodepoly::{aj_polynomials, enumerate_templates, node_polynomial, severi_numeric};
use floor_diagrams::sequences::{
    closed_counts, diagram_to_tree, max_tangency_sequence, ode_residual, tree_to_diagram, underlying_tree_report,
    LabeledTree,
};
use floor_diagrams::tables::{verify_suite, Suite};
use floor_diagrams::tropical::{
    extract, reconstruct, render_diagram, render_marked, render_sketch, verify_curve, write_svg, StretchedConfig,
    SvgLayout,
};
use floor_diagrams::{Engine, FloorDiagram, Partition};
use num_bigint::BigUint;
use serde_json::Value;

use crate::output::{allow, num, obj, print_json, CliError, CliResult, Format};
use crate::{
    BijectionKind, Cli, Command, CountsArgs, EnumerateArgs, InvariantKind, MarkingsArgs, NodepolyArgs, RenderArgs,
    SequenceKind, SuiteArg, TableArgs, TropicalKind, VerifyArgs,
};

use Format::{Csv, Json, Jsonl, Svg, Text};

struct Ctx {
    engine: Engine,
    format: Format,
    verbose: bool,
}

/// `Ok(false)` means the command ran but found a mismatch.
pub fn run(cli: Cli) -> CliResult<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let engine = match &cli.cache_dir {
        Some(dir) => Engine::with_cache(DiagramCache::new(dir)?),
        None => Engine::new(),
    };
    let ctx = Ctx { engine, format: cli.format, verbose: cli.verbose };
    let start = Instant::now();
    let out = match cli.command {
        Command::Enumerate(a) => enumerate(&ctx, a),
        Command::Markings(a) => markings(&ctx, a),
        Command::Invariant { kind } => invariant(&ctx, kind),
        Command::Nodepoly(a) => nodepoly(&ctx, a),
        Command::Sequence { kind } => sequence(&ctx, kind),
        Command::Bijection { kind } => bijection(&ctx, kind),
        Command::Counts(a) => counts(&ctx, a),
        Command::Tropical { kind } => tropical(&ctx, kind),
        Command::Render(a) => render(&ctx, a),
        Command::VerifyTables(a) => verify_tables(&ctx, a),
    };
    if ctx.verbose {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    out
}

fn diagram(text: &str) -> CliResult<FloorDiagram> {
    Ok(FloorDiagram::parse_any(text)?)
}

fn partition(text: &str) -> CliResult<Partition> {
    Ok(text.parse()?)
}

fn enumerate(ctx: &Ctx, a: EnumerateArgs) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json, Jsonl, Csv], "enumerate")?;
    let mut q = match (a.g, a.delta) {
        (Some(g), _) => DiagramQuery::genus(a.d, g),
        (None, Some(delta)) => DiagramQuery::cogenus(a.d, delta),
        (None, None) => unreachable!("clap requires one of --g/--delta"),
    };
    for f in &a.filters {
        q = q.with_filter(f.parse::<Filter>()?);
    }
    let ds = ctx.engine.diagrams(&q)?;
    if ctx.verbose {
        eprintln!("query {}: {} diagrams", q.key(), ds.len());
    }
    match ctx.format {
        Text if a.count => println!("{}", ds.len()),
        Text => ds.iter().for_each(|g| println!("{}", g.to_text())),
        Csv => {
            println!("diagram,mu,genus");
            for g in ds.iter() {
                println!("\"{}\",{},{}", g.to_text(), g.multiplicity(), g.genus());
            }
        }
        Jsonl => {
            for g in ds.iter() {
                println!("{}", serde_json::json!({ "diagram": g.to_text(), "mu": num(g.multiplicity()) }));
            }
        }
        _ => {
            let mut fields = vec![("d", num(a.d)), ("count", num(ds.len())), ("query", Value::String(q.key()))];
            if !a.count {
                fields.push(("diagrams", Value::Array(ds.iter().map(|g| Value::String(g.to_text())).collect())));
            }
            print_json(&obj("enumerate", fields));
        }
    }
    Ok(true)
}

fn markings(ctx: &Ctx, a: MarkingsArgs) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json], "markings")?;
    let g = diagram(&a.diagram)?;
    let lambda = partition(a.lambda.as_deref().unwrap_or(""))?;
    let rho = match &a.rho {
        Some(r) => partition(r)?,
        None => Partition::ones(g.d() - lambda.size().min(g.d())),
    };
    let nu = count_relative_markings(&g, &lambda, &rho)?;
    let oracle = if a.oracle { Some(brute_force_markings(&g, &lambda, &rho)?) } else { None };
    let list = if a.list { Some(list_markings(&g, &lambda, &rho)?) } else { None };
    let agree = oracle.as_ref().is_none_or(|o| *o == nu);
    match ctx.format {
        Json => {
            let mut fields = vec![
                ("diagram", Value::String(g.to_text())),
                ("lambda", Value::String(lambda.to_string())),
                ("rho", Value::String(rho.to_string())),
                ("mu", num(g.multiplicity())),
                ("nu", num(&nu)),
            ];
            if let Some(o) = &oracle {
                fields.push(("oracle", num(o)));
            }
            if let Some(ms) = &list {
                fields.push(("markings", Value::Array(ms.iter().map(|m| Value::String(m.to_string())).collect())));
            }
            print_json(&obj("markings", fields));
        }
        _ => {
            println!("nu = {nu}");
            if let Some(o) = &oracle {
                println!("exhaustive = {o}{}", if agree { "" } else { "  MISMATCH" });
            }
            for m in list.iter().flatten() {
                println!("{m}");
            }
        }
    }
    Ok(agree)
}

fn table_rows(
    ctx: &Ctx,
    t: &TableArgs,
    f: impl Fn(&Engine, u32, u32) -> floor_diagrams::Result<BigUint>,
) -> CliResult<Vec<(u32, u32, BigUint)>> {
    let mut rows = Vec::new();
    for d in 1..=t.max_d {
        for k in 0..=t.max_g {
            rows.push((d, k, f(&ctx.engine, d, k)?));
        }
    }
    Ok(rows)
}

fn print_table(ctx: &Ctx, kind: &str, second: &str, t: &TableArgs, rows: &[(u32, u32, BigUint)]) {
    match ctx.format {
        Json => {
            let cells = rows
                .iter()
                .map(|(d, k, v)| serde_json::json!({ "d": num(d), second: num(k), "value": num(v) }))
                .collect();
            print_json(&obj("invariant", vec![("kind", Value::String(kind.into())), ("table", Value::Array(cells))]));
        }
        Csv => {
            println!("d,{second},value");
            for (d, k, v) in rows {
                println!("{d},{k},{v}");
            }
        }
        _ => {
            let width = rows.iter().map(|r| r.2.to_string().len()).max().unwrap_or(1).max(4);
            let mut head = format!("{:>8}", "");
            for d in 1..=t.max_d {
                head += &format!(" {:>width$}", format!("d={d}"));
            }
            println!("{head}");
            for k in 0..=t.max_g {
                let mut line = format!("{:>8}", format!("{second}={k}"));
                for (_, _, v) in rows.iter().filter(|r| r.1 == k) {
                    line += &format!(" {v:>width$}");
                }
                println!("{line}");
            }
        }
    }
}

fn print_value(ctx: &Ctx, kind: &str, params: Vec<(&str, Value)>, v: &BigUint) {
    match ctx.format {
        Json => {
            let mut fields = vec![("kind", Value::String(kind.into()))];
            fields.extend(params);
            fields.push(("value", num(v)));
            print_json(&obj("invariant", fields));
        }
        _ => println!("{v}"),
    }
}

fn invariant(ctx: &Ctx, kind: InvariantKind) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json, Csv], "invariant")?;
    match kind {
        InvariantKind::Gw(a) if a.table.table => {
            let rows = table_rows(ctx, &a.table, gw)?;
            print_table(ctx, "gw", "g", &a.table, &rows);
        }
        InvariantKind::Gw(a) => {
            let (d, g) = (a.d.expect("required"), a.g.expect("required"));
            if ctx.verbose && g > max_genus(d) {
                eprintln!("genus {g} exceeds the maximum {} for degree {d}", max_genus(d));
            }
            print_value(ctx, "gw", vec![("d", num(d)), ("g", num(g))], &gw(&ctx.engine, d, g)?);
        }
        InvariantKind::Severi(a) if a.table.table => {
            let rows = table_rows(ctx, &a.table, severi)?;
            print_table(ctx, "severi", "delta", &a.table, &rows);
        }
        InvariantKind::Severi(a) => {
            let (d, delta) = (a.d.expect("required"), a.delta.expect("required"));
            print_value(ctx, "severi", vec![("d", num(d)), ("delta", num(delta))], &severi(&ctx.engine, d, delta)?);
        }
        InvariantKind::Relative(a) => {
            let (l, r) = (partition(&a.lambda)?, partition(&a.rho)?);
            let v = relative_gw(&ctx.engine, a.d, a.g, &l, &r)?;
            let params = vec![
                ("d", num(a.d)),
                ("g", num(a.g)),
                ("lambda", Value::String(l.to_string())),
                ("rho", Value::String(r.to_string())),
            ];
            print_value(ctx, "relative", params, &v);
        }
        InvariantKind::Welschinger(a) => {
            print_value(ctx, "welschinger", vec![("d", num(a.d))], &welschinger(&ctx.engine, a.d)?);
        }
    }
    Ok(true)
}

fn nodepoly(ctx: &Ctx, a: NodepolyArgs) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json], "nodepoly")?;
    let np = node_polynomial(a.delta);
    let poly = np.polynomial.format_in("d");
    let aj = if a.aj && a.delta >= 1 { aj_polynomials(a.delta) } else { Vec::new() };
    let templates = if a.templates { enumerate_templates(a.delta) } else { Vec::new() };
    let eval = a.eval_d.map(|d| (d, np.polynomial.eval_int(d as i64), severi_numeric(d, a.delta)));
    match ctx.format {
        Json => {
            let mut fields = vec![
                ("delta", num(a.delta)),
                ("polynomial", Value::String(poly)),
                ("threshold", num(np.threshold)),
            ];
            if a.aj {
                let list = aj.iter().map(|p| Value::String(p.format_in("d"))).collect();
                fields.push(("aj", Value::Array(list)));
            }
            if a.templates {
                let list = templates
                    .iter()
                    .map(|t| {
                        let s = t.stats();
                        serde_json::json!({
                            "template": t.to_string(),
                            "length": num(s.length),
                            "mu": num(&s.mu),
                            "epsilon": num(s.epsilon),
                            "kappa": s.kappa.iter().map(num).collect::<Vec<_>>(),
                            "k_min": num(s.k_min),
                            "p": t.extension_polynomial().format_in("k"),
                        })
                    })
                    .collect();
                fields.push(("templates", Value::Array(list)));
            }
            if let Some((d, p, s)) = &eval {
                fields.push(("eval", serde_json::json!({ "d": num(d), "polynomial": num(p), "template_sum": num(s) })));
            }
            print_json(&obj("nodepoly", fields));
        }
        _ => {
            println!("N_{}(d) = {poly}   (valid for d >= {})", a.delta, np.threshold);
            for (j, p) in aj.iter().enumerate() {
                println!("A_{}(d) = {}", j + 1, p.format_in("d"));
            }
            for t in &templates {
                let s = t.stats();
                println!(
                    "{t}  mu={} eps={} kappa={:?} k_min={} P={}",
                    s.mu,
                    s.epsilon,
                    s.kappa,
                    s.k_min,
                    t.extension_polynomial().format_in("k")
                );
            }
            if let Some((d, p, s)) = &eval {
                println!("at d={d}: polynomial {p}, template sum {s}");
            }
        }
    }
    Ok(true)
}

fn sequence(ctx: &Ctx, kind: SequenceKind) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json, Csv], "sequence")?;
    match kind {
        SequenceKind::Z { max_d } => {
            let z = max_tangency_sequence(max_d);
            let rows: Vec<(u32, &BigUint, BigUint)> =
                z.iter().enumerate().map(|(i, v)| (i as u32 + 1, v, v * (i as u32 + 1))).collect();
            match ctx.format {
                Json => {
                    let list = rows
                        .iter()
                        .map(|(d, f, g)| serde_json::json!({ "d": num(d), "fixed": num(f), "free": num(g) }))
                        .collect();
                    print_json(&obj("sequence", vec![("kind", Value::String("z".into())), ("values", Value::Array(list))]));
                }
                Csv => {
                    println!("d,fixed,free");
                    rows.iter().for_each(|(d, f, g)| println!("{d},{f},{g}"));
                }
                _ => rows.iter().for_each(|(d, f, g)| println!("{d:>3} {f:>32} {g:>34}")),
            }
            Ok(true)
        }
        SequenceKind::OdeCheck { order } => {
            let c = ode_residual(order as usize)?;
            let zero = c.is_zero();
            match ctx.format {
                Json => print_json(&obj(
                    "sequence",
                    vec![
                        ("kind", Value::String("ode-check".into())),
                        ("y", Value::Array(c.y.iter().map(num).collect())),
                        ("residual", Value::Array(c.residual.iter().map(num).collect())),
                        ("zero", Value::Bool(zero)),
                    ],
                )),
                _ => {
                    for (i, y) in c.y.iter().enumerate().skip(1) {
                        println!("y_{i} = {y}");
                    }
                    println!("residual through x^{}: {}", order - 1, if zero { "all zero" } else { "NONZERO" });
                }
            }
            Ok(zero)
        }
    }
}

fn bijection(ctx: &Ctx, kind: BijectionKind) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json], "bijection")?;
    let (input, output) = match kind {
        BijectionKind::ToTree { diagram: text } => {
            let g = diagram(&text)?;
            (g.to_text(), diagram_to_tree(&g)?.to_string())
        }
        BijectionKind::ToDiagram { tree } => {
            let t: LabeledTree = tree.parse()?;
            (t.to_string(), tree_to_diagram(&t)?.to_text())
        }
    };
    match ctx.format {
        Json => print_json(&obj("bijection", vec![("input", Value::String(input)), ("output", Value::String(output))])),
        _ => println!("{output}"),
    }
    Ok(true)
}

fn counts(ctx: &Ctx, a: CountsArgs) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json, Csv], "counts")?;
    let mut records = Vec::new();
    for d in 1..=a.d {
        records.push((closed_counts(d)?, if a.trees && d <= 8 { Some(underlying_tree_report(d)?) } else { None }));
    }
    let opt = |x: Option<&BigUint>| x.map_or("-".to_string(), |v| v.to_string());
    match ctx.format {
        Json => {
            let list = records
                .iter()
                .map(|(c, t)| {
                    let mut m = serde_json::json!({
                        "d": num(c.d),
                        "cayley": num(&c.cayley),
                        "alternating": num(&c.alternating),
                        "odd": num(&c.odd),
                        "cyclic_increasing": num(&c.cyclic_increasing),
                    });
                    if let Some(e) = &c.enumerated {
                        m["enumerated"] = serde_json::json!({
                            "diagrams": num(&e.diagrams),
                            "multiplicity_free": num(&e.multiplicity_free),
                            "odd": num(&e.odd),
                        });
                    }
                    if let Some(t) = t {
                        m["underlying_trees"] = num(t.underlying_trees);
                    }
                    m
                })
                .collect();
            print_json(&obj("counts", vec![("rows", Value::Array(list))]));
        }
        Csv => {
            println!("d,cayley,alternating,odd,cyclic_increasing,diagrams,multiplicity_free,odd_enumerated,underlying_trees");
            for (c, t) in &records {
                let e = c.enumerated.as_ref();
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    c.d,
                    c.cayley,
                    c.alternating,
                    c.odd,
                    c.cyclic_increasing,
                    opt(e.map(|e| &e.diagrams)),
                    opt(e.map(|e| &e.multiplicity_free)),
                    opt(e.map(|e| &e.odd)),
                    t.as_ref().map_or("-".into(), |t| t.underlying_trees.to_string())
                );
            }
        }
        _ => {
            println!("{:>3} {:>12} {:>10} {:>10} {:>10} {:>12} {:>10} {:>10}", "d", "trees", "alt", "odd", "cyclic", "diagrams", "unit", "odd(enum)");
            for (c, t) in &records {
                let e = c.enumerated.as_ref();
                println!(
                    "{:>3} {:>12} {:>10} {:>10} {:>10} {:>12} {:>10} {:>10}",
                    c.d,
                    c.cayley,
                    c.alternating,
                    c.odd,
                    c.cyclic_increasing,
                    opt(e.map(|e| &e.diagrams)),
                    opt(e.map(|e| &e.multiplicity_free)),
                    opt(e.map(|e| &e.odd))
                );
                if let Some(t) = t {
                    println!("    underlying trees of genus-0 diagrams: {} (alternating trees: {})", t.underlying_trees, t.alternating);
                }
            }
        }
    }
    Ok(true)
}

fn genus_of(g: &FloorDiagram) -> CliResult<u32> {
    if !g.is_connected() {
        return Err(CliError::Lib(floor_diagrams::Error::Domain("tropical reconstruction needs a connected diagram".into())));
    }
    Ok(g.genus())
}

fn tropical(ctx: &Ctx, kind: TropicalKind) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json], "tropical")?;
    let layout = SvgLayout::default();
    match kind {
        TropicalKind::Reconstruct { diagram: text, marking, config, svg } => {
            let g = diagram(&text)?;
            let genus = genus_of(&g)?;
            let m: Marking = marking.parse()?;
            let cfg = StretchedConfig::new(g.d(), genus, config)?;
            let s = reconstruct(&g, &m, &cfg)?;
            let report = verify_curve(&s, g.d(), genus);
            let round_trip = extract(&s)? == (g.clone(), m.clone());
            if let Some(path) = &svg {
                write_svg(path, &render_sketch(&s, &layout))?;
            }
            match ctx.format {
                Json => {
                    let checks = report
                        .checks
                        .iter()
                        .map(|c| serde_json::json!({ "name": c.name, "ok": c.ok, "detail": c.detail }))
                        .collect();
                    let floors = s
                        .floors
                        .iter()
                        .map(|f| {
                            serde_json::json!({
                                "vertex": num(f.vertex),
                                "slopes": f.slopes.iter().map(num).collect::<Vec<_>>(),
                                "breakpoints": f.breakpoints.iter().map(|(x, y)| vec![num(x), num(y)]).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    print_json(&obj(
                        "tropical",
                        vec![
                            ("diagram", Value::String(g.to_text())),
                            ("marking", Value::String(m.to_string())),
                            ("floors", Value::Array(floors)),
                            ("checks", Value::Array(checks)),
                            ("round_trip", Value::Bool(round_trip)),
                        ],
                    ));
                }
                _ => {
                    print!("{report}");
                    println!("{} round trip", if round_trip { "ok  " } else { "FAIL" });
                }
            }
            Ok(report.ok() && round_trip)
        }
        TropicalKind::Gallery { d, g, config, out } => {
            std::fs::create_dir_all(&out)?;
            let cfg = StretchedConfig::new(d, g, config)?;
            let rho = Partition::ones(d);
            let mut entries = Vec::new();
            let mut all_ok = true;
            for dg in ctx.engine.diagrams(&DiagramQuery::genus(d, g))?.iter() {
                for m in list_markings(dg, &Partition::empty(), &rho)? {
                    let s = reconstruct(dg, &m, &cfg)?;
                    let ok = verify_curve(&s, d, g).ok() && extract(&s)? == (dg.clone(), m.clone());
                    all_ok &= ok;
                    let file = format!("curve-{:03}.svg", entries.len() + 1);
                    write_svg(&out.join(&file), &render_sketch(&s, &layout))?;
                    entries.push((file, dg.to_text(), m.to_string(), ok));
                }
            }
            match ctx.format {
                Json => {
                    let list = entries
                        .iter()
                        .map(|(f, dg, m, ok)| serde_json::json!({ "file": f, "diagram": dg, "marking": m, "ok": ok }))
                        .collect();
                    print_json(&obj("tropical", vec![("count", num(entries.len())), ("curves", Value::Array(list))]));
                }
                _ => {
                    for (f, dg, m, ok) in &entries {
                        println!("{f}  {}  {dg}  |  {m}", if *ok { "ok  " } else { "FAIL" });
                    }
                    println!("{} curves written to {}", entries.len(), out.display());
                }
            }
            Ok(all_ok)
        }
    }
}

fn render(ctx: &Ctx, a: RenderArgs) -> CliResult<bool> {
    if ctx.format != Text {
        allow(ctx.format, &[Svg], "render")?;
    }
    let layout = SvgLayout::default();
    let g = diagram(&a.diagram)?;
    let svg = match &a.marking {
        None => render_diagram(&g, &layout),
        Some(m) => {
            let m: Marking = m.parse()?;
            if a.sketch {
                let cfg = StretchedConfig::new(g.d(), genus_of(&g)?, a.config)?;
                render_sketch(&reconstruct(&g, &m, &cfg)?, &layout)
            } else {
                render_marked(&g, &m, &layout)?
            }
        }
    };
    match &a.out {
        Some(path) => write_svg(path, &svg)?,
        None => print!("{svg}"),
    }
    Ok(true)
}

fn verify_tables(ctx: &Ctx, a: VerifyArgs) -> CliResult<bool> {
    allow(ctx.format, &[Text, Json], "verify-tables")?;
    let suites: Vec<Suite> = if a.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        a.suites
            .iter()
            .map(|s| match s {
                SuiteArg::Gw => Suite::Gw,
                SuiteArg::Severi => Suite::Severi,
                SuiteArg::Relative => Suite::Relative,
                SuiteArg::Tangency => Suite::Tangency,
                SuiteArg::Catalog => Suite::Catalog,
                SuiteArg::Templates => Suite::Templates,
            })
            .collect()
    };
    let mut all_ok = true;
    let mut reports = Vec::new();
    for s in suites {
        let start = Instant::now();
        let r = verify_suite(&ctx.engine, s, a.max_d)?;
        if ctx.verbose {
            eprintln!("{s}: {:.3}s", start.elapsed().as_secs_f64());
        }
        all_ok &= r.ok();
        reports.push(r);
    }
    match ctx.format {
        Json => {
            let list = reports
                .iter()
                .map(|r| {
                    let bad: Vec<Value> = r
                        .mismatches()
                        .map(|m| serde_json::json!({ "label": m.label, "expected": m.expected, "actual": m.actual }))
                        .collect();
                    serde_json::json!({ "suite": r.suite.name(), "ok": r.ok(), "checked": num(r.rows.len()), "mismatches": bad })
                })
                .collect();
            print_json(&obj("verify-tables", vec![("ok", Value::Bool(all_ok)), ("suites", Value::Array(list))]));
        }
        _ => reports.iter().for_each(|r| print!("{r}")),
    }
    Ok(all_ok)
}
