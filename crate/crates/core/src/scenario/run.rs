use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algcore::{make_symbol_algebra, Cocycle, KummerExtension, ProbeClass};
use crate::deltaalg::{
    check_split, crossed_product_derivation, filtration_extension, matrix_entrywise_derivation, nilpotent_witness,
    remark_product_identities, symbol_filtration_spec, Ansatz, DeltaAlgebra, SplitOutcome, CONSTANT_FIELD_BANNER,
};
use crate::exactfield::{subfield_membership, Field, Fq, FqT, Poly, RandomElem, RatFnField, Rationals, QT};
use crate::galoisideals::{action_on_constants, classify_delta_structure, kummer_galois_group, reductivity_note};
use crate::itderiv::{check_iterative_axioms, divided_powers, extend_to_kummer, filtration_membership, restriction_mismatch, DerivationTable, FqTable};

use super::report::{OperationResult, RunReport, Summary};
use super::{AlgebraConfig, DerivationConfig, Operation, Scenario, ScenarioError};

/// Command-line overrides: a seed and a global truncation order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub trunc: Option<usize>,
}

const FILTRATION_ORDER_CAP: u64 = 4096;

type OpOutcome = Result<(bool, Value, Vec<String>), String>;

fn scalar_table<C: Field>(s: &Scenario, field: &RatFnField<C>, len: usize) -> Result<DerivationTable<C>, ScenarioError> {
    let table = match &s.derivation {
        DerivationConfig::Hasse { corrupt } => {
            let mut images = DerivationTable::hasse(field.clone(), len).images().to_vec();
            if let Some(c) = corrupt {
                let v = field
                    .elem_from_json(&c.value)
                    .map_err(|e| ScenarioError::invalid("/derivation/corrupt/value", e.to_string()))?;
                if c.order <= len {
                    images[c.order] = v;
                }
            }
            DerivationTable::new(field.clone(), images)
        }
        DerivationConfig::Trivial => Ok(DerivationTable::trivial(field.clone(), len)),
        DerivationConfig::DividedPowers { d1 } => {
            let d = field.elem_from_json(d1).map_err(|e| ScenarioError::invalid("/derivation/d1", e.to_string()))?;
            divided_powers(field.clone(), d, len)
        }
    };
    table.map_err(|e| ScenarioError::invalid("/derivation", e.to_string()))
}

fn axioms_op<C: RandomElem>(table: &DerivationTable<C>, n: usize, samples: usize, seed: u64) -> OpOutcome {
    let r = check_iterative_axioms(table, n, samples, seed).map_err(|e| e.to_string())?;
    Ok((r.all_ok(), serde_json::to_value(&r).expect("serializable"), Vec::new()))
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

struct CharP<'a> {
    s: &'a Scenario,
    n: usize,
    seed: u64,
    fq: Fq,
    f: FqT,
    split: Option<(KummerExtension, DeltaAlgebra<Fq>, FqTable, SplitOutcome)>,
}

impl<'a> CharP<'a> {
    fn new(s: &'a Scenario, n: usize, seed: u64) -> Result<Self, ScenarioError> {
        let p = s.field.char;
        let fq = if s.field.ext_degree == 1 { Fq::prime(p) } else { Fq::with_degree(p, s.field.ext_degree) }
            .map_err(|e| ScenarioError::invalid("/field", e.to_string()))?;
        let f = FqT::new(fq.clone(), 't');
        scalar_table(s, &f, 1)?;
        if let Some(AlgebraConfig::Nilpotent { x, .. }) = &s.algebra {
            f.elem_from_json(x).map_err(|e| ScenarioError::invalid("/algebra/x", e.to_string()))?;
        }
        if let Some(ext) = &s.extension {
            KummerExtension::new(fq.clone(), ext.degree, ext.zeta).map_err(|e| ScenarioError::invalid("/extension", e.to_string()))?;
        }
        Ok(CharP { s, n, seed, fq, f, split: None })
    }

    fn table(&self, len: usize) -> Result<FqTable, String> {
        scalar_table(self.s, &self.f, len).map_err(err)
    }

    fn kummer(&self) -> Result<KummerExtension, String> {
        let ext = self.s.extension.as_ref().ok_or("no extension configured")?;
        KummerExtension::new(self.fq.clone(), ext.degree, ext.zeta).map_err(err)
    }

    fn symbol_b(&self) -> Result<i64, String> {
        match self.s.algebra {
            Some(AlgebraConfig::Symbol { b }) => Ok(b),
            _ => Err("no symbol algebra configured".into()),
        }
    }

    fn p(&self) -> usize {
        self.fq.p() as usize
    }

    fn run(&mut self, op: Operation) -> OpOutcome {
        match op {
            Operation::Axioms => axioms_op(&self.table(2 * self.n)?, self.n, self.s.samples, self.seed),
            Operation::KummerExtend => self.kummer_extend(),
            Operation::FiltrationMembership => self.filtration_membership(),
            Operation::CrossedProduct => self.crossed_product(),
            Operation::FiltrationExtend => self.filtration_extend(),
            Operation::Split => self.split(),
            Operation::Classify => self.classify(),
            Operation::Nilpotent => self.nilpotent(),
        }
    }

    fn kummer_extend(&self) -> OpOutcome {
        let kx = self.kummer()?;
        let e = kx.degree();
        let df = self.table(2 * self.n)?;
        let dk = extend_to_kummer(&df, e, 2 * self.n).map_err(err)?;
        let mismatch = restriction_mismatch(&df, &dk, e, self.n, self.s.samples, self.seed).map_err(err)?;
        let axioms = check_iterative_axioms(&dk, self.n, self.s.samples, self.seed).map_err(err)?;
        let k = kx.ext_field();
        let d1s = dk.derive(&k.gen(), 1).map_err(err)?;
        let passed = mismatch.is_none() && axioms.all_ok();
        Ok((
            passed,
            json!({
                "degree": e,
                "zeta": kx.fq().render(&kx.zeta()),
                "delta1_s": k.render(&d1s),
                "restriction_samples": self.s.samples,
                "restriction_mismatch": mismatch.map(|(f, n)| json!({"element": f, "order": n})),
                "axioms": axioms,
            }),
            Vec::new(),
        ))
    }

    fn filtration_membership(&self) -> OpOutcome {
        let p = self.fq.p();
        let levels: Vec<u32> = (1..=2).filter(|&m| p.pow(m) <= FILTRATION_ORDER_CAP).collect();
        let top = levels.iter().map(|&m| p.pow(m) as usize - 1).max().unwrap_or(1);
        let table = self.table(top)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut rows = Vec::new();
        let mut passed = true;
        for &m in &levels {
            let (mut members, mut disagreements) = (0usize, Vec::new());
            for idx in 0..self.s.samples {
                let g = if idx % 2 == 0 {
                    self.f.inflate(&self.f.random_bounded(&mut rng, 2), p.pow(m) as usize)
                } else {
                    self.f.random_bounded(&mut rng, 6)
                };
                let lhs = filtration_membership(&table, &g, m).map_err(err)?;
                let rhs = subfield_membership(&self.f, &g, m).map_err(err)?;
                members += usize::from(rhs);
                if lhs != rhs && disagreements.len() < 4 {
                    disagreements.push(self.f.render(&g));
                }
                passed &= lhs == rhs;
            }
            rows.push(json!({"m": m, "samples": self.s.samples, "members": members, "disagreements": disagreements}));
        }
        Ok((passed, json!({"levels": rows}), Vec::new()))
    }

    fn crossed(&self, kx: &KummerExtension, len: usize) -> Result<(Cocycle, FqTable, FqTable, DeltaAlgebra<Fq>), String> {
        let b = self.symbol_b()?;
        let cocycle = Cocycle::symbol(kx, &kx.ext_field().from_i64(b)).map_err(err)?;
        let df = self.table(len)?;
        let dk = extend_to_kummer(&df, kx.degree(), len).map_err(err)?;
        let da = crossed_product_derivation(kx, &cocycle, &df, &dk, len).map_err(err)?;
        Ok((cocycle, df, dk, da))
    }

    fn crossed_product(&self) -> OpOutcome {
        let kx = self.kummer()?;
        let (cocycle, _, dk, da) = self.crossed(&kx, self.n)?;
        let checked = remark_product_identities(&da, &kx, &cocycle, &dk).map_err(err)?;
        let alg = da.alg();
        Ok((
            true,
            json!({
                "dim": da.dim(),
                "labels": alg.labels(),
                "validated_orders": self.n,
                "product_identities_checked": checked,
                "cocycle": cocycle.to_json(kx.ext_field()),
                "delta1_basis": (0..da.dim()).map(|i| alg.render_elem(&da.basis_images(i)[1])).collect::<Vec<_>>(),
            }),
            Vec::new(),
        ))
    }

    fn filtration_extend(&self) -> OpOutcome {
        let kx = self.kummer()?;
        let b = self.symbol_b()?;
        let (_, df, _, cp) = self.crossed(&kx, self.n)?;
        let ff = kx.base_field().clone();
        let p = self.fq.p();
        let depth = (1..).find(|&d| p.checked_pow(d).map_or(true, |q| q > self.n as u64)).unwrap() as usize;
        let sym = make_symbol_algebra(ff.clone(), &ff.gen(), &ff.from_i64(b), kx.degree(), &ff.constant(kx.zeta())).map_err(err)?;
        let spec = symbol_filtration_spec(&ff, kx.degree(), depth);
        let fe = filtration_extension(sym, &spec, &df, self.n).map_err(err)?;
        let mismatched: Vec<String> =
            (0..fe.dim()).filter(|&i| fe.basis_images(i) != cp.basis_images(i)).map(|i| fe.alg().labels()[i].clone()).collect();
        Ok((
            mismatched.is_empty(),
            json!({
                "levels": depth,
                "orders": self.n,
                "identical_to_crossed_product": mismatched.is_empty(),
                "mismatched_basis": mismatched,
            }),
            Vec::new(),
        ))
    }

    fn ensure_split(&mut self) -> Result<(), String> {
        if self.split.is_some() {
            return Ok(());
        }
        let kx = self.kummer()?;
        let len = self.n + self.p();
        let (a, dk) = match self.s.algebra {
            Some(AlgebraConfig::Matrix { n }) => {
                let df = self.table(len)?;
                let dk = extend_to_kummer(&df, kx.degree(), len).map_err(err)?;
                (matrix_entrywise_derivation(n, &df).map_err(err)?, dk)
            }
            Some(AlgebraConfig::Symbol { .. }) => {
                let (_, _, dk, da) = self.crossed(&kx, len)?;
                (da, dk)
            }
            _ => return Err("split needs a matrix or symbol algebra".into()),
        };
        let ansatz = match self.s.ansatz {
            Some(c) => Ansatz { num_degree: c.num_degree, denominator: Poly::x(kx.fq()), power: c.power },
            None => Ansatz::default_for(&kx),
        };
        let outcome = check_split(&a, &kx, &dk, &ansatz, self.n).map_err(err)?;
        self.split = Some((kx, a, dk, outcome));
        Ok(())
    }

    fn split(&mut self) -> OpOutcome {
        self.ensure_split()?;
        let (_, _, _, out) = self.split.as_ref().expect("computed");
        let csa_ok = out.csa.as_ref().is_some_and(|c| c.central && c.simple);
        let passed = out.report.split && out.multiplicative && csa_ok;
        let mut v = out.report.to_json();
        let obj = v.as_object_mut().expect("object");
        obj.insert("multiplicative".into(), json!(out.multiplicative));
        obj.insert("csa".into(), json!(out.csa));
        obj.insert("constants".into(), out.constants.to_json());
        Ok((passed, v, vec![out.report.truncation.caveat.clone()]))
    }

    fn classify(&mut self) -> OpOutcome {
        self.ensure_split()?;
        let (kx, a, dk, out) = self.split.as_ref().expect("computed");
        let group = kummer_galois_group(kx, dk, self.n, self.seed).map_err(err)?;
        let mut rep = action_on_constants(&out.constants, kx, &group).map_err(err)?;
        let cl = classify_delta_structure(a, kx, out, &rep, self.seed).map_err(err)?;
        rep.projective_lifts = cl.lifts.clone();
        let note = reductivity_note(&cl);
        let mut caveats = vec!["desk-scale: the Galois image is the finite group of F_q-points; lattice statements stand in for smooth-group statements".to_string()];
        if !cl.lattice.exhaustive {
            caveats.push("lattice from a seeded meataxe closure; completeness not guaranteed".into());
        }
        Ok((
            cl.verified(),
            json!({
                "group": group.iter().map(|g| g.to_json(kx)).collect::<Vec<_>>(),
                "representation": rep.to_json(),
                "lattice": cl.lattice.to_json(),
                "classification": cl.to_json(),
                "decomposition_verified": cl.decomposition_verified,
                "reductivity": note.certificate,
            }),
            caveats,
        ))
    }

    fn nilpotent(&self) -> OpOutcome {
        let Some(AlgebraConfig::Nilpotent { i, x }) = &self.s.algebra else {
            return Err("no nilpotent algebra configured".into());
        };
        let p = self.fq.p();
        let base = FqT::new(Fq::prime(p).map_err(err)?, 't');
        let x = base.elem_from_json(x).map_err(err)?;
        let order = p.checked_pow(*i).ok_or("p^i overflows")?;
        let f = base.pow(&x, order);
        let w = nilpotent_witness(p, *i, &f, &x).map_err(err)?;
        let alg = &w.algebra;
        let z_nonzero = !alg.is_zero(&w.z);
        let z_pow_zero = alg.is_zero(&alg.pow(&w.z, w.order));
        let probe_ok = w.probe.classification == ProbeClass::Nilpotent && w.probe.verify(alg, &w.z);
        let mut v = w.to_json();
        let obj = v.as_object_mut().expect("object");
        obj.insert("z_nonzero".into(), json!(z_nonzero));
        obj.insert("z_pow_zero".into(), json!(z_pow_zero));
        obj.insert("probe_verified".into(), json!(probe_ok));
        Ok((z_nonzero && z_pow_zero && probe_ok, v, Vec::new()))
    }
}

fn record(operation: Operation, started: Instant, outcome: OpOutcome) -> OperationResult {
    let (passed, result, caveats) = match outcome {
        Ok(x) => x,
        Err(e) => (false, json!({"error": e}), Vec::new()),
    };
    if passed {
        log::info!("{}: pass", operation.name());
    } else {
        log::warn!("{}: FAIL", operation.name());
    }
    OperationResult { operation: operation.name().to_string(), passed, result, caveats, elapsed: started.elapsed() }
}

/// Runs every operation of a scenario in order. Config problems surface as
/// `ConfigInvalid` before any operation runs; failed checks and computation
/// errors are recorded in the report.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<RunReport, ScenarioError> {
    let mut s = s.clone();
    if let Some(t) = opts.trunc {
        s.trunc = t;
    }
    s.validate()?;
    let seed = opts.seed.unwrap_or(s.seed);
    let n = s.trunc;
    log::info!("scenario {} (seed {seed}, trunc {n})", s.name);
    let mut operations = Vec::with_capacity(s.operations.len());
    let banner;
    if s.field.char == 0 {
        banner = "constant-field: Q".to_string();
        let field = QT::new(Rationals, 't');
        scalar_table(&s, &field, 1)?;
        for &op in &s.operations {
            let started = Instant::now();
            let outcome = match op {
                Operation::Axioms => scalar_table(&s, &field, 2 * n).map_err(err).and_then(|t| axioms_op(&t, n, s.samples, seed)),
                other => Err(format!("{} needs positive characteristic", other.name())),
            };
            operations.push(record(op, started, outcome));
        }
    } else {
        banner = CONSTANT_FIELD_BANNER.to_string();
        let mut ctx = CharP::new(&s, n, seed)?;
        for &op in &s.operations {
            let started = Instant::now();
            let outcome = ctx.run(op);
            operations.push(record(op, started, outcome));
        }
    }
    let passed = operations.iter().filter(|o| o.passed).count();
    let failed = operations.len() - passed;
    let mut config = s.to_json();
    config.as_object_mut().expect("object").insert("seed".into(), json!(seed));
    Ok(RunReport {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        banner,
        scenario: s.name.clone(),
        seed,
        trunc: n,
        config,
        operations,
        summary: Summary { passed, failed, all_passed: failed == 0 },
    })
}

/// Runs several scenarios, concurrently when `parallel` is set; the results
/// come back sorted by scenario name either way.
pub fn run_many(scenarios: &[Scenario], opts: &RunOptions, parallel: bool) -> Vec<(String, Result<RunReport, ScenarioError>)> {
    let mut out: Vec<(String, Result<RunReport, ScenarioError>)> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = scenarios.iter().map(|s| scope.spawn(move || (s.name.clone(), run_scenario(s, opts)))).collect();
            handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
        })
    } else {
        scenarios.iter().map(|s| (s.name.clone(), run_scenario(s, opts))).collect()
    };
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
