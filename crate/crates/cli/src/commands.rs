use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use qroofline::circuit::{
    block_histogram, compute_metrics, parse_qasm, partition_3q_blocks, partition_max_2q_blocks,
    read_count_records_csv, read_count_records_json, Circuit, CircuitMetrics, CountRecord,
};
use qroofline::linalg::{block_unitary, weyl_coordinates, write_weyl_csv, WeylPoint, WeylRow};
use qroofline::machines::{MachineConfig, Registry};
use qroofline::models::{self, ModelKind};
use qroofline::roofline::{
    linspace, one_qubit_threshold, required_fidelity_delta, sweep_grid, threshold_ratio,
    two_qubit_threshold, FidelityRange, OneQubitPolicy, RatioOptions, RegionLabel, ThresholdReport,
};
use qroofline::simulator::{validation_sweep, write_sweep_csv, FidelityMapping, NoiseParams};
use qroofline::Exec;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{input, io_err, sink, usage, write_json, CliError, RunManifest};

/// Whether the run ended on a solver flag.
pub type Outcome = Result<bool, CliError>;

pub fn run(cli: &Cli) -> Outcome {
    let registry = match &cli.global.datasheet {
        Some(p) => {
            Registry::load(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
        }
        None => Registry::bundled(),
    };
    let mut ctx = Ctx {
        cli,
        registry: &registry,
        inputs: Vec::new(),
    };
    if let Some(p) = &cli.global.datasheet {
        ctx.inputs.push(p.clone());
    }
    match &cli.command {
        Command::Metrics(a) => ctx.metrics(a),
        Command::Fidelity(a) => ctx.fidelity(a),
        Command::Compare(a) => ctx.compare(a),
        Command::Threshold(a) => ctx.threshold(a),
        Command::Weyl(a) => ctx.weyl(a),
        Command::Validate(a) => ctx.validate(a),
        Command::Machines(MachinesCommand::List) => ctx.machines_list(),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    registry: &'a Registry,
    inputs: Vec<PathBuf>,
}

struct Side<'r> {
    label: char,
    metrics: Option<CircuitMetrics>,
    machine: Option<&'r MachineConfig>,
    f1: Option<f64>,
    f2: Option<f64>,
}

impl Side<'_> {
    fn workload(&self) -> Result<&CircuitMetrics, CliError> {
        let l = self.label;
        self.metrics.as_ref().ok_or_else(|| {
            usage(format!(
                "side {l} needs a workload: --{l}-circuit, --{l}-counts or --{l}-record"
            ))
        })
    }
}

impl<'a> Ctx<'a> {
    fn format(&self, default: Format) -> Format {
        self.cli.global.format.unwrap_or(default)
    }

    fn manifest(&self, command: &str) -> Value {
        let m = RunManifest {
            command: command.to_string(),
            inputs: self.inputs.clone(),
            parameters: serde_json::to_value(self.cli).expect("arguments serialize"),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        serde_json::to_value(m).expect("manifest serializes")
    }

    fn emit_json(&self, command: &str, mut body: Value) -> Result<(), CliError> {
        body["manifest"] = self.manifest(command);
        let mut w = sink(self.cli.global.out.as_deref())?;
        write_json(&mut w, &body)?;
        w.flush().map_err(io_err)
    }

    fn emit_csv(
        &self,
        f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let mut w = sink(self.cli.global.out.as_deref())?;
        f(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)
    }

    fn circuit(&mut self, path: &Path) -> Result<Circuit, CliError> {
        self.inputs.push(path.to_path_buf());
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        parse_qasm(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn machine(&self, name: &str) -> Result<&'a MachineConfig, CliError> {
        self.registry.lookup(name).map_err(input)
    }

    fn metrics(&mut self, a: &MetricsArgs) -> Outcome {
        let m = compute_metrics(&self.circuit(&a.circuit)?);
        match self.format(Format::Json) {
            Format::Json => self.emit_json("metrics", json!({ "metrics": m }))?,
            Format::Csv => self.emit_csv(|w| {
                writeln!(w, "width,n1,n2,m,depth,p1,p2")?;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    m.width, m.n1, m.n2, m.m, m.depth, m.p1, m.p2
                )
            })?,
        }
        Ok(false)
    }

    fn fidelity(&mut self, a: &FidelityArgs) -> Outcome {
        let metrics = match (&a.circuit, &a.counts) {
            (Some(p), None) => compute_metrics(&self.circuit(p)?),
            (None, Some(c)) => {
                let (n1, n2) = parse_counts(c)?;
                CircuitMetrics::from_counts(n1, n2)
            }
            _ => return Err(usage("give a circuit file or --counts n1,n2")),
        };
        let machine = a.machine.as_deref().map(|n| self.machine(n)).transpose()?;
        let gate1 = machine
            .map(|m| m.gate_or_default(1, None))
            .transpose()
            .map_err(input)?;
        let gate2 = machine
            .map(|m| m.gate_or_default(2, a.gate.as_deref()))
            .transpose()
            .map_err(input)?;
        if machine.is_none() && a.gate.is_some() {
            return Err(usage("--gate needs --machine"));
        }
        let f1 = a.f1.or(gate1.map(|g| g.avg_fidelity)).unwrap_or(1.0);
        let f2 = a.f2.or(gate2.map(|g| g.avg_fidelity)).unwrap_or(1.0);
        let estimate = match a.model {
            Model::Digital => models::digital_fidelity(&metrics, f1, f2).map_err(input)?,
            Model::Cyclic => {
                let e = |over: Option<f64>,
                         g: Option<&qroofline::machines::GateSpec>,
                         f: f64,
                         k: usize| match (over, g) {
                    (None, Some(g)) => Ok(g.process_infidelity()),
                    _ => models::average_to_process(f, k).map(|p| 1.0 - p),
                };
                let e1 = e(a.f1, gate1, f1, 1).map_err(input)?;
                let e2 = e(a.f2, gate2, f2, 2).map_err(input)?;
                models::cyclic_fidelity(&metrics, e1, e2).map_err(input)?
            }
            Model::Coupling => {
                let missing = |g: Option<&qroofline::machines::GateSpec>| {
                    CliError::Input(match (machine, g) {
                        (Some(m), Some(g)) => {
                            format!("gate `{}` on `{}` has no coupling_error", g.name, m.name)
                        }
                        _ => "coupling model needs --ec1/--ec2 or a machine with coupling_error"
                            .to_string(),
                    })
                };
                let ec1 = a
                    .ec1
                    .or(gate1.and_then(|g| g.coupling_error))
                    .ok_or_else(|| missing(gate1))?;
                let ec2 = a
                    .ec2
                    .or(gate2.and_then(|g| g.coupling_error))
                    .ok_or_else(|| missing(gate2))?;
                let counts = machine.map(|m| m.coupling_counts());
                let c1 =
                    a.c1.or(counts.map(|c| c.c1))
                        .ok_or_else(|| usage("coupling model needs --c1 or --machine"))?;
                let c2 =
                    a.c2.or(counts.map(|c| c.c2))
                        .ok_or_else(|| usage("coupling model needs --c2 or --machine"))?;
                models::coupling_fidelity(metrics.n1, metrics.n2, ec1, ec2, c1, c2)
                    .map_err(input)?
            }
        };
        match self.format(Format::Json) {
            Format::Json => {
                let echo = json!({
                    "machine": machine.map(|m| m.name.clone()),
                    "gate_1q": gate1,
                    "gate_2q": gate2,
                    "f1": f1,
                    "f2": f2,
                    "metrics": metrics,
                });
                self.emit_json(
                    "fidelity",
                    json!({ "estimate": estimate, "inputs_echo": echo }),
                )?
            }
            Format::Csv => self.emit_csv(|w| {
                writeln!(w, "model,value,ln_value")?;
                writeln!(
                    w,
                    "{},{},{}",
                    serde_json::to_value(a.model)
                        .expect("serializes")
                        .as_str()
                        .unwrap_or(""),
                    estimate.value,
                    estimate.ln_value
                )
            })?,
        }
        Ok(false)
    }

    fn records(&mut self, s: &Sides) -> Result<Vec<CountRecord>, CliError> {
        let Some(p) = &s.records else {
            return Ok(Vec::new());
        };
        self.inputs.push(p.clone());
        let f = File::open(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
        let json = p
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let out = if json {
            read_count_records_json(f)
        } else {
            read_count_records_csv(f)
        };
        out.map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
    }

    #[allow(clippy::too_many_arguments)]
    fn side(
        &mut self,
        label: char,
        circuit: Option<&PathBuf>,
        counts: Option<&String>,
        record: Option<&String>,
        machine: Option<&String>,
        gate: Option<&String>,
        records: &[CountRecord],
    ) -> Result<Side<'a>, CliError> {
        let metrics = match (circuit, counts, record) {
            (None, None, None) => None,
            (Some(p), None, None) => Some(compute_metrics(&self.circuit(p)?)),
            (None, Some(c), None) => {
                let (n1, n2) = parse_counts(c)?;
                Some(CircuitMetrics::from_counts(n1, n2))
            }
            (None, None, Some(r)) => {
                let key: Vec<&str> = r.split(',').map(str::trim).collect();
                let [b, g, t] = key[..] else {
                    return Err(usage(format!("--{label}-record wants benchmark,gate_set,topology")));
                };
                let rec = records
                    .iter()
                    .find(|x| x.benchmark == b && x.gate_set == g && x.topology == t)
                    .ok_or_else(|| CliError::Input(format!("no count record {b},{g},{t}")))?;
                Some(CircuitMetrics::from_counts(rec.n1.unwrap_or(0) as usize, rec.n2 as usize))
            }
            _ => {
                return Err(usage(format!(
                    "side {label}: give at most one of --{label}-circuit, --{label}-counts, --{label}-record"
                )))
            }
        };
        let machine = machine.map(|n| self.machine(n)).transpose()?;
        if machine.is_none() && gate.is_some() {
            return Err(usage(format!("--{label}-gate needs --{label}-machine")));
        }
        let f1 = machine
            .map(|m| m.gate_or_default(1, None).map(|g| g.avg_fidelity))
            .transpose()
            .map_err(input)?;
        let f2 = machine
            .map(|m| {
                m.gate_or_default(2, gate.map(String::as_str))
                    .map(|g| g.avg_fidelity)
            })
            .transpose()
            .map_err(input)?;
        Ok(Side {
            label,
            metrics,
            machine,
            f1,
            f2,
        })
    }

    fn sides(&mut self, s: &Sides) -> Result<(Side<'a>, Side<'a>), CliError> {
        let records = self.records(s)?;
        let a = self.side(
            'a',
            s.a_circuit.as_ref(),
            s.a_counts.as_ref(),
            s.a_record.as_ref(),
            s.a_machine.as_ref(),
            s.a_gate.as_ref(),
            &records,
        )?;
        let b = self.side(
            'b',
            s.b_circuit.as_ref(),
            s.b_counts.as_ref(),
            s.b_record.as_ref(),
            s.b_machine.as_ref(),
            s.b_gate.as_ref(),
            &records,
        )?;
        Ok((a, b))
    }

    fn compare(&mut self, args: &CompareArgs) -> Outcome {
        let (a, b) = self.sides(&args.sides)?;
        let (nx, ny) = parse_grid(&args.grid)?;
        let (x0, x1) = parse_pair(&args.x, ':', "--x")?;
        let (y0, y1) = parse_pair(&args.y, ':', "--y")?;
        let r1a = parse_range(&args.r1a, "--r1a")?;
        let r1b = parse_range(&args.r1b, "--r1b")?;
        let model = model_kind(args.model);
        let xs = linspace(x0, x1, nx);
        let ys = linspace(y0, y1, ny);
        let (ma, mb) = (a.workload()?, b.workload()?);
        let grid = sweep_grid(ma, mb, &xs, &ys, r1a, r1b, model, Exec::default()).map_err(input)?;
        let f1a = args.f1a.or(a.f1).unwrap_or(r1a.hi);
        let f1b = args.f1b.or(b.f1).unwrap_or(r1b.hi);
        let report = two_qubit_threshold(ma, mb, f1a, f1b, args.f2b_max, model).map_err(input)?;
        let flagged = report.status.is_flag();
        let names = json!([
            a.machine.map(|m| m.name.clone()),
            b.machine.map(|m| m.name.clone())
        ]);
        if let Some(p) = &args.threshold_out {
            let body = json!({ "threshold": report, "machines": names, "manifest": self.manifest("compare") });
            let mut f = sink(Some(p))?;
            write_json(&mut f, &body)?;
            f.flush().map_err(io_err)?;
        }
        match self.format(Format::Csv) {
            Format::Csv => self.emit_csv(|w| grid.write_csv(w))?,
            Format::Json => {
                let counts = json!({
                    "always_a": grid.count(RegionLabel::AlwaysA),
                    "always_b": grid.count(RegionLabel::AlwaysB),
                    "one_qubit_dependent": grid.count(RegionLabel::OneQubitDependent),
                    "out_of_domain": grid.cells.iter().filter(|c| c.out_of_domain).count(),
                });
                self.emit_json(
                    "compare",
                    json!({ "machines": names, "grid": grid, "label_counts": counts, "threshold": report }),
                )?
            }
        }
        Ok(flagged)
    }

    fn threshold(&mut self, args: &ThresholdArgs) -> Outcome {
        let (a, b) = self.sides(&args.sides)?;
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| usage(format!("{flag} or a machine is required")))
        };
        let policy = match args.policy {
            Policy::Shared => OneQubitPolicy::Shared,
            Policy::PerMachine => OneQubitPolicy::PerMachine,
        };
        let model = model_kind(args.model);
        let report: ThresholdReport = match args.kind {
            Kind::OneQubit => {
                let f2a = need(args.f2a.or(a.f2), "--f2a")?;
                let f2b = need(args.f2b.or(b.f2), "--f2b")?;
                one_qubit_threshold(a.workload()?.n2, b.workload()?.n2, f2a, f2b, policy)
                    .map_err(input)?
            }
            Kind::Ratio => {
                let f2a = need(args.f2a.or(a.f2), "--f2a")?;
                let f2b = need(args.f2b.or(b.f2), "--f2b")?;
                let opts = RatioOptions {
                    x_max: args.x_max,
                    tolerance: args.tolerance,
                    policy,
                };
                threshold_ratio(a.workload()?.n2, f2a, f2b, args.f1_floor, opts).map_err(input)?
            }
            Kind::TwoQubit => {
                let f1a = need(args.f1a.or(a.f1), "--f1a")?;
                let f1b = need(args.f1b.or(b.f1), "--f1b")?;
                two_qubit_threshold(a.workload()?, b.workload()?, f1a, f1b, args.f2b_max, model)
                    .map_err(input)?
            }
            Kind::Delta => {
                let f1a = need(args.f1a.or(a.f1), "--f1a")?;
                let f1b = need(args.f1b.or(b.f1), "--f1b")?;
                let f2b = need(args.f2b.or(b.f2), "--f2b")?;
                required_fidelity_delta(a.workload()?, b.workload()?, f1b, f2b, f1a, model)
                    .map_err(input)?
            }
        };
        let flagged = report.status.is_flag();
        let names = json!([
            a.machine.map(|m| m.name.clone()),
            b.machine.map(|m| m.name.clone())
        ]);
        match self.format(Format::Json) {
            Format::Json => self.emit_json(
                "threshold",
                json!({ "machines": names, "threshold": report }),
            )?,
            Format::Csv => self.emit_csv(|w| {
                let kind = serde_json::to_value(report.kind).expect("serializes");
                let status = serde_json::to_value(report.status).expect("serializes");
                writeln!(w, "kind,value,bracket_lo,bracket_hi,status")?;
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    kind.as_str().unwrap_or(""),
                    report.value,
                    report.bracket[0],
                    report.bracket[1],
                    status.as_str().unwrap_or("")
                )
            })?,
        }
        Ok(flagged)
    }

    fn weyl(&mut self, args: &WeylArgs) -> Outcome {
        let c = self.circuit(&args.circuit)?;
        let blocks = if args.blocks == 3 {
            partition_3q_blocks(&c)
        } else {
            partition_max_2q_blocks(&c)
        };
        let histogram = block_histogram(&blocks);
        let as_histogram = args.histogram || args.blocks == 3;
        let mut rows = Vec::new();
        if !as_histogram {
            for (id, b) in blocks.iter().enumerate() {
                let point = if b.qubits.len() < 2 {
                    WeylPoint::new(0.0, 0.0, 0.0)
                } else {
                    let u = block_unitary(b, 1 << b.qubits.len()).map_err(input)?;
                    weyl_coordinates(&u).map_err(input)?
                };
                rows.push(WeylRow {
                    block_id: id,
                    qubits: b.qubits.clone(),
                    point,
                });
            }
        }
        match self.format(Format::Csv) {
            Format::Csv if as_histogram => self.emit_csv(|w| {
                writeln!(w, "two_qubit_gates,blocks")?;
                for (k, n) in &histogram {
                    writeln!(w, "{k},{n}")?;
                }
                Ok(())
            })?,
            Format::Csv => self.emit_csv(|w| write_weyl_csv(w, &rows))?,
            Format::Json => {
                let hist: Vec<[usize; 2]> = histogram.iter().map(|(&k, &n)| [k, n]).collect();
                let body = json!({
                    "block_size": args.blocks,
                    "blocks": if as_histogram { Value::Null } else { json!(rows) },
                    "histogram": hist,
                    "convention": "block qubits are listed ascending; the first listed qubit is the most significant bit of the block unitary index; coordinates are in units of pi/2 with c1 >= c2 >= c3 >= 0",
                });
                self.emit_json("weyl", body)?
            }
        }
        Ok(false)
    }

    fn validate(&mut self, args: &ValidateArgs) -> Outcome {
        let cnots = parse_usize_range(&args.cnots, "--cnots")?;
        let depths = parse_usize_range(&args.depths, "--depths")?;
        let (p1, p2) = parse_pair(&args.noise, ',', "--noise")?;
        let noise = NoiseParams::new(p1, p2).map_err(input)?;
        let mapping = match args.mapping {
            Mapping::OneMinusP => FidelityMapping::OneMinusP,
            Mapping::ProcessToAverage => FidelityMapping::ProcessToAverage,
        };
        let rows = validation_sweep(
            args.width,
            &cnots,
            &depths,
            noise,
            args.trajectories,
            self.cli.global.seed,
            mapping,
            Exec::default(),
        )
        .map_err(input)?;
        match self.format(Format::Csv) {
            Format::Csv => self.emit_csv(|w| write_sweep_csv(w, &rows))?,
            Format::Json => self.emit_json("validate", json!({ "rows": rows }))?,
        }
        Ok(false)
    }

    fn machines_list(&mut self) -> Outcome {
        match self.format(Format::Csv) {
            Format::Csv => self.emit_csv(|w| {
                writeln!(w, "name,technology,qubit_count,topology,gates")?;
                for m in self.registry.iter() {
                    let topo = serde_json::to_value(&m.topology).expect("serializes");
                    let gates: Vec<String> = m
                        .gates
                        .iter()
                        .map(|g| format!("{}={}", g.name, g.avg_fidelity))
                        .collect();
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        m.name,
                        m.technology,
                        m.qubit_count,
                        topo["kind"].as_str().unwrap_or(""),
                        gates.join(";")
                    )?;
                }
                Ok(())
            })?,
            Format::Json => {
                let machines: Vec<&MachineConfig> = self.registry.iter().collect();
                self.emit_json("machines list", json!({ "machines": machines }))?
            }
        }
        Ok(false)
    }
}

fn model_kind(m: Model) -> ModelKind {
    match m {
        Model::Digital => ModelKind::Digital,
        Model::Cyclic => ModelKind::Cyclic,
        Model::Coupling => ModelKind::Coupling,
    }
}

fn parse_f64(s: &str, flag: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{flag}: `{s}` is not a number")))
}

fn parse_pair(s: &str, sep: char, flag: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = s
        .split_once(sep)
        .ok_or_else(|| usage(format!("{flag}: expected `a{sep}b`, got `{s}`")))?;
    Ok((parse_f64(a, flag)?, parse_f64(b, flag)?))
}

fn parse_range(s: &str, flag: &str) -> Result<FidelityRange, CliError> {
    let (lo, hi) = parse_pair(s, ':', flag)?;
    FidelityRange::new(lo, hi).map_err(|e| usage(format!("{flag}: {e}")))
}

fn parse_counts(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || usage(format!("counts must be `n1,n2`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || {
        usage(format!(
            "--grid must be `NXxNY` with positive sizes, got `{s}`"
        ))
    };
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nx: usize = a.trim().parse().map_err(|_| bad())?;
    let ny: usize = b.trim().parse().map_err(|_| bad())?;
    if nx == 0 || ny == 0 {
        return Err(bad());
    }
    Ok((nx, ny))
}

/// `lo:hi:step` (inclusive) or `a,b,c`.
fn parse_usize_range(s: &str, flag: &str) -> Result<Vec<usize>, CliError> {
    let bad = || {
        usage(format!(
            "{flag}: expected `lo:hi:step` or a comma list, got `{s}`"
        ))
    };
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(bad());
        };
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if step == 0 || lo > hi {
            return Err(bad());
        }
        Ok((lo..=hi).step_by(step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}
