//! One function per subcommand. Each returns the outcome body, the human
//! rendering and any failures or unresolved entries.

use kraus_core::audit::{
    build_real_cyclotomic, check_theorem1_hypotheses, check_theorem2_hypotheses, check_theorem3,
    field_profile, real_cyclotomic_index, registry_lookup_field, CheckStatus, HypothesisReport,
};
use kraus_core::frey::{check_solution, frey_curve, property_check, FreyPropertyReport};
use kraus_core::kraus::{certify_conductor_p, normalize, TwistCertificate, Verdict};
use kraus_core::localred::{conductor, split_by_node_tangents, tate_reduce};
use kraus_core::nf::{factor_rational_prime_u64, Field};
use kraus_core::scout::{
    hasse_contradiction_level, search_conductor_target, trace_congruence_scan, ConductorGoal,
    SearchBox, SearchOptions, TorsionFilter,
};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{parse_ainvs, parse_element, parse_field, parse_triple, parse_witness, select_prime};
use crate::{
    CliError, Command, Context, CurveCmd, FieldCmd, FreyCmd, KrausCmd, Outcome, ScoutCmd,
    TorsionArg,
};

type Res = Result<Outcome, CliError>;

pub(crate) fn execute(cmd: &Command, ctx: &Context) -> Res {
    match cmd {
        Command::Field(FieldCmd::Audit(a)) => field_audit(&a.field.field, a.l, a.witness.as_deref()),
        Command::Field(FieldCmd::Cyclotomic(a)) => field_cyclotomic(a.r),
        Command::Curve(CurveCmd::Invariants(a)) => curve_invariants(&a.field.field, &a.ainvs, ctx),
        Command::Curve(CurveCmd::Reduce(a)) => curve_reduce(
            &a.curve.field.field,
            &a.curve.ainvs,
            a.prime.prime,
            a.prime.index,
        ),
        Command::Curve(CurveCmd::Conductor(a)) => curve_conductor(&a.field.field, &a.ainvs, ctx),
        Command::Kraus(KrausCmd::Normalize(a)) => kraus_normalize(
            &a.field.field,
            a.triple.as_deref(),
            a.lam.as_deref(),
            a.prime.prime,
            a.prime.index,
            ctx,
        ),
        Command::Frey(FreyCmd::Check(a)) => {
            frey_check(&a.field.field, &a.witness, a.prime.prime, a.prime.index, ctx)
        }
        Command::Scout(ScoutCmd::Search(a)) => scout_search(a, ctx),
        Command::Scout(ScoutCmd::Congruence(a)) => {
            scout_congruence(&a.curve.field.field, &a.curve.ainvs, a.l, a.q_bound)
        }
        Command::FltPipeline(a) => flt_pipeline(
            &a.witness.field.field,
            &a.witness.witness,
            a.witness.prime.prime,
            a.witness.prime.index,
            ctx,
        ),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

impl Outcome {
    fn put<T: Serialize>(&mut self, key: &str, v: &T) {
        self.body.insert(key.into(), to_value(v));
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    /// Fold a scorecard in: failing items are failures, unknown items are
    /// unresolved, asserted sources become provenance notes.
    fn absorb(&mut self, r: &HypothesisReport) {
        self.line(format!("{}: {}", r.theorem, status_word(r.overall())));
        for it in &r.items {
            let note = if it.informational { ", informational" } else { "" };
            self.line(format!("  [{}] {}: {} ({}{note})", status_word(it.status), it.label, it.detail, it.source));
            let tagged = format!("{}: {}", r.theorem, it.label);
            match it.status {
                _ if it.informational => {}
                CheckStatus::Pass => {}
                CheckStatus::Fail => self.failures.push(format!("{tagged}: {}", it.detail)),
                CheckStatus::Unknown => self.unresolved.push(format!("{tagged}: {}", it.detail)),
            }
            if it.source != "computed" && it.source != "none" {
                self.provenance.push(format!("{} [{}]", it.label, it.source));
            }
        }
    }
}

fn status_word(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Unknown => "unknown",
    }
}

fn field_audit(field: &str, l: u64, witness: Option<&str>) -> Res {
    let k = parse_field(field)?;
    let w = witness.map(|w| parse_element(&k, w)).transpose()?;
    let cd = registry_lookup_field(&k).ok();
    let mut out = Outcome::default();
    out.line(format!("K = Q[x]/({})", k.poly_string()));
    let profile = field_profile(&k, l, w.as_ref())?;
    out.put("profile", &profile);
    match &cd {
        Some(rec) => out.provenance.push(format!("class data [{}]", rec.source.tag())),
        None => out.line("no class data registered for this field"),
    }
    let t1 = check_theorem1_hypotheses(&k, l, w.as_ref(), cd.as_ref())?;
    let t2 = check_theorem2_hypotheses(&k, cd.as_ref())?;
    out.absorb(&t1);
    out.absorb(&t2);
    let mut cards = vec![to_value(&t1), to_value(&t2)];
    if real_cyclotomic_index(&k).is_some() {
        let t3 = check_theorem3(&k)?;
        out.absorb(&t3);
        cards.push(to_value(&t3));
    }
    out.body.insert("scorecards".into(), Value::Array(cards));
    Ok(out)
}

fn eisenstein_at_2(poly: &[BigInt]) -> bool {
    let two = BigInt::from(2);
    let four = BigInt::from(4);
    let n = poly.len() - 1;
    poly[..n].iter().all(|c| (c % &two).is_zero()) && !(&poly[0] % &four).is_zero()
}

fn field_cyclotomic(r: u32) -> Res {
    let k = build_real_cyclotomic(r)?;
    let primes = factor_rational_prime_u64(&k, 2)?;
    let eis = eisenstein_at_2(k.defining_poly());
    let sturm = k.count_real_embeddings();
    let ramified = primes.len() == 1 && primes[0].e() as usize == k.degree();
    let mut out = Outcome::default();
    out.put("r", &r);
    out.put("defining_poly", &k.poly_string());
    out.put("coefficients", &k.defining_poly().iter().map(|c| c.to_string()).collect::<Vec<_>>());
    out.put("degree", &k.degree());
    out.put("eisenstein_at_2", &eis);
    out.put("sturm_real_roots", &sturm);
    out.put("primes_above_2", &primes);
    out.put("totally_ramified_at_2", &ramified);
    out.line(k.poly_string());
    for p in &primes {
        out.line(format!("e={} at 2 (f={})", p.e(), p.f()));
    }
    out.line(format!("Sturm {sturm}"));
    out.line(format!("Eisenstein at 2: {eis}"));
    if !eis {
        out.failures.push("defining polynomial is not Eisenstein at 2".into());
    }
    if sturm != k.degree() {
        out.failures.push(format!("only {sturm} real roots of {}", k.degree()));
    }
    if !ramified {
        out.failures.push("2 is not totally ramified".into());
    }
    Ok(out)
}

fn curve_invariants(field: &str, ainvs: &str, ctx: &Context) -> Res {
    let k = parse_field(field)?;
    let e = parse_ainvs(&k, ainvs)?;
    let inv = e.invariants();
    let tt = e.two_torsion_structure(ctx.sqrt_height)?;
    let mut out = Outcome::default();
    out.put("model", &e);
    out.put("invariants", &inv);
    out.put("two_torsion", &tt);
    out.line(format!("model {e:?}"));
    out.line(format!("c4 = {}", inv.c4));
    out.line(format!("c6 = {}", inv.c6));
    out.line(format!("disc = {}", inv.discriminant));
    out.line(format!("j = {}", inv.j));
    out.line(format!("2-torsion: {:?}", tt.structure));
    if !tt.conclusive {
        out.unresolved.push("two-torsion root search hit its height bound".into());
    }
    Ok(out)
}

fn curve_reduce(field: &str, ainvs: &str, p: u64, index: usize) -> Res {
    let k = parse_field(field)?;
    let e = parse_ainvs(&k, ainvs)?;
    let prime = select_prime(&k, p, index)?;
    let t = tate_reduce(&e, &prime)?;
    let mut out = Outcome::default();
    out.put("reduction", &t.data);
    out.put("minimal_model", &t.minimal_model);
    out.line(format!(
        "at {}: {} f={} v(Dmin)={} {}",
        prime,
        t.data.kodaira,
        t.data.f_exponent,
        t.data.vdelta_min,
        to_value(&t.data.multiplicative_split).as_str().unwrap_or_default()
    ));
    if t.data.kodaira.is_multiplicative() {
        let tangents = split_by_node_tangents(&e, &prime)?;
        out.put("node_tangents", &tangents);
        if tangents != t.data.multiplicative_split {
            out.failures
                .push("split test via -c4/c6 disagrees with the node tangents".into());
        }
    }
    Ok(out)
}

fn curve_conductor(field: &str, ainvs: &str, ctx: &Context) -> Res {
    let k = parse_field(field)?;
    let e = parse_ainvs(&k, ainvs)?;
    let data = conductor(&e, ctx.budget)?;
    let mut norm = BigInt::from(1);
    for d in &data {
        let nq = BigInt::from(d.prime.norm().ok_or_else(|| {
            CliError::Input("residue field too large to report its norm".into())
        })?);
        norm *= nq.pow(d.f_exponent);
    }
    let mut out = Outcome::default();
    out.put("factors", &data);
    out.put("norm", &norm.to_string());
    for d in &data {
        out.line(format!("{}^{} ({})", d.prime, d.f_exponent, d.kodaira));
    }
    out.line(format!("norm of conductor: {norm}"));
    Ok(out)
}

fn render_certificate(out: &mut Outcome, cert: &TwistCertificate) {
    out.line(format!("P = {}", cert.prime));
    if let Some(st) = &cert.sorted_triple {
        let [va, vb, vc] = st.valuations;
        out.line(format!(
            "sorted (a, b, c) = ({}, {}, {}), valuations ({va}, {vb}, {vc}), parity {:?}",
            st.a, st.b, st.c, st.parity
        ));
    }
    out.line(format!("lam = {}", cert.lam));
    out.line(format!("model {:?}", cert.model));
    out.line(format!("t = {}, 4*ord(2) = {}, v(j) = {}", cert.t, 4 * cert.e2, cert.v_j));
    for (i, s) in cert.steps.iter().enumerate() {
        let mark = if s.passed { "ok" } else { "FAILED" };
        out.line(format!("{:>2}. {} [{mark}] {}", i + 1, s.step, s.detail));
    }
    for f in &cert.offp_reduction {
        out.line(format!("    off P: {} {} f={}", f.prime, f.kodaira, f.f_exponent));
    }
    match &cert.verdict {
        Verdict::Full => out.line("verdict: full"),
        Verdict::LocalOnly { reason } => out.line(format!("verdict: local-only ({reason})")),
        Verdict::Failed { step, reason } => out.line(format!("verdict: failed at {step} ({reason})")),
    }
}

fn verdict_failures(out: &mut Outcome, cert: &TwistCertificate) {
    if let Verdict::Failed { step, reason } = &cert.verdict {
        out.failures.push(format!("{step}: {reason}"));
    }
}

fn kraus_normalize(
    field: &str,
    triple: Option<&str>,
    lam: Option<&str>,
    p: u64,
    index: usize,
    ctx: &Context,
) -> Res {
    let k = parse_field(field)?;
    let prime = select_prime(&k, p, index)?;
    let cert = match (triple, lam) {
        (Some(t), _) => {
            let [a, b, c] = parse_triple(&k, t)?;
            normalize(&a, &b, &c, &prime, ctx.budget)?
        }
        (None, Some(l)) => certify_conductor_p(&parse_element(&k, l)?, &prime, ctx.budget)?,
        (None, None) => return Err(CliError::Input("need --triple or --lam".into())),
    };
    let mut out = Outcome::default();
    out.put("certificate", &cert);
    render_certificate(&mut out, &cert);
    verdict_failures(&mut out, &cert);
    Ok(out)
}

fn render_properties(out: &mut Outcome, r: &FreyPropertyReport) {
    out.line(format!("full 2-torsion: {}", r.full_two_torsion));
    out.line(format!("potentially good away from P: {}", r.potentially_good_away));
    for q in &r.away_primes {
        out.line(format!("    v(j) at {} = {}", q.prime, q.v_j));
    }
    out.line(format!(
        "potentially multiplicative at P: {} (v(j) = {})",
        r.potentially_multiplicative_at_p, r.v_j_at_p
    ));
    if !r.full_two_torsion {
        out.failures.push("Frey curve lacks full 2-torsion".into());
    }
    if !r.potentially_good_away {
        out.failures.push("Frey curve is not potentially good away from P".into());
    }
    if !r.potentially_multiplicative_at_p {
        out.failures.push("Frey curve is not potentially multiplicative at P".into());
    }
}

fn frey_check(field: &str, witness: &str, p: u64, index: usize, ctx: &Context) -> Res {
    let k = parse_field(field)?;
    let w = parse_witness(&k, witness)?;
    let prime = select_prime(&k, p, index)?;
    let sol = check_solution(&w.a, &w.b, &w.c, w.p)?;
    let mut out = Outcome::default();
    out.put("witness", &sol);
    if sol.trivial {
        out.line("trivial solution: no Frey curve");
        out.failures.push("trivial solution".into());
        return Ok(out);
    }
    let e = frey_curve(&sol)?;
    out.put("frey_model", &e);
    out.line(format!("Frey curve {e:?}"));
    let props = property_check(&e, &prime, ctx.budget)?;
    out.put("properties", &props);
    render_properties(&mut out, &props);
    Ok(out)
}

fn scout_search(a: &crate::SearchArgs, ctx: &Context) -> Res {
    let k = parse_field(&a.field.field)?;
    let goal = match (a.target, a.conductor) {
        (Some(t), None) => ConductorGoal::prime(select_prime(&k, t, a.index)?),
        (None, Some(n)) => ConductorGoal::rational(&k, n).map_err(|e| CliError::Input(e.to_string()))?,
        _ => return Err(CliError::Input("need exactly one of --target or --conductor".into())),
    };
    let filter = match a.torsion {
        TorsionArg::Any => TorsionFilter::Any,
        TorsionArg::Full => TorsionFilter::Full,
    };
    let bx = SearchBox::new(k.clone(), a.height, filter);
    let opts = SearchOptions {
        jobs: ctx.jobs,
        factor_budget: ctx.budget,
        sqrt_height: ctx.sqrt_height,
    };
    let report = search_conductor_target(&bx, &goal, opts)?;
    let mut out = Outcome::default();
    out.put("search", &report);
    out.line(format!(
        "{} over Q[x]/({}) with H = {}, {}",
        report.target, report.field, report.height, report.torsion_filter
    ));
    out.line(format!(
        "enumerated {}, filtered {}, classified {}, unresolved {}",
        report.totals.enumerated,
        report.totals.filtered,
        report.totals.classified,
        report.totals.unresolved
    ));
    for h in &report.hits {
        let cond: Vec<String> = h
            .conductor
            .iter()
            .map(|c| format!("{}^{} {}", c.prime, c.f_exponent, c.kodaira))
            .collect();
        out.line(format!(
            "hit A = {:?}, B = {:?}: {}{}",
            h.point.a,
            h.point.b,
            cond.join(", "),
            if h.verified { "" } else { " (NOT verified)" }
        ));
        if !h.verified {
            out.failures.push(format!("hit {:?} failed the second pass", h.point));
        }
    }
    for u in &report.unresolved {
        out.unresolved.push(format!("A = {:?}, B = {:?}: {}", u.point.a, u.point.b, u.reason));
    }
    out.line(format!("{} hits", report.hits.len()));
    Ok(out)
}

fn scout_congruence(field: &str, ainvs: &str, l: u64, q_bound: u64) -> Res {
    let k = parse_field(field)?;
    let e = parse_ainvs(&k, ainvs)?;
    if l < 2 {
        return Err(CliError::Input("l must be a prime".into()));
    }
    let scan = trace_congruence_scan(&e, l, q_bound)?;
    let levels: Vec<Value> = scan
        .per_prime
        .iter()
        .map(|c| json!({ "norm": c.norm, "hasse_level": hasse_contradiction_level(c.norm, l) }))
        .collect();
    let mut out = Outcome::default();
    out.put("scan", &scan);
    out.body.insert("hasse_levels".into(), Value::Array(levels));
    out.line(format!(
        "{} good primes of norm <= {q_bound}; a_q = 1 + Nq mod {l}^{} at all of them",
        scan.per_prime.len(),
        scan.global_n_max
    ));
    Ok(out)
}

fn pipeline_field_cards(out: &mut Outcome, k: &Field) -> Result<bool, CliError> {
    let cd = registry_lookup_field(k).ok();
    if let Some(rec) = &cd {
        out.provenance.push(format!("class data [{}]", rec.source.tag()));
    }
    let t1 = check_theorem1_hypotheses(k, 2, None, cd.as_ref())?;
    let t2 = check_theorem2_hypotheses(k, cd.as_ref())?;
    out.absorb(&t1);
    out.absorb(&t2);
    let applies = t1.overall() == CheckStatus::Pass;
    out.body.insert("scorecards".into(), json!([to_value(&t1), to_value(&t2)]));
    Ok(applies)
}

fn flt_pipeline(field: &str, witness: &str, p: u64, index: usize, ctx: &Context) -> Res {
    let k = parse_field(field)?;
    let w = parse_witness(&k, witness)?;
    let prime = select_prime(&k, p, index)?;
    let sol = check_solution(&w.a, &w.b, &w.c, w.p)?;
    let mut out = Outcome::default();
    out.put("witness", &sol);
    out.line(format!("1. solution ({}, {}, {}) with p = {}", sol.a, sol.b, sol.c, sol.p));
    if sol.trivial {
        out.line("   trivial: the chain does not start");
        out.failures.push("trivial solution".into());
        return Ok(out);
    }
    let e = frey_curve(&sol)?;
    out.put("frey_model", &e);
    out.line(format!("2. Frey curve {e:?}"));
    let props = property_check(&e, &prime, ctx.budget)?;
    out.put("properties", &props);
    render_properties(&mut out, &props);

    let n = u32::try_from(sol.p).map_err(|_| CliError::Input("exponent too large".into()))?;
    let cert = normalize(&sol.a.pow(n), &sol.b.pow(n), &sol.c.pow(n), &prime, ctx.budget)?;
    out.put("certificate", &cert);
    out.line("3. twist normalization at P");
    render_certificate(&mut out, &cert);
    verdict_failures(&mut out, &cert);

    out.line("4. hypotheses on K");
    let applies = pipeline_field_cards(&mut out, &k)?;
    let conclusion = if applies && props.all_pass() {
        "K satisfies the conductor-prime criterion at l = 2, so no elliptic curve over K has full \
         2-torsion and conductor P; the Frey curve of this solution has the shape whose level-lowered \
         form would be such a curve, a contradiction for large exponents"
            .to_string()
    } else if !props.all_pass() {
        "the Frey curve does not have the required local shape; no contradiction drawn".to_string()
    } else {
        "the hypotheses on K are not all established; no contradiction drawn".to_string()
    };
    out.line(format!("conclusion: {conclusion}"));
    out.put("conclusion", &conclusion);
    Ok(out)
}
