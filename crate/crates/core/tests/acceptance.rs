//! Acceptance suite: every criterion runs with exact rational comparison and
//! prints one PASS/FAIL line. Exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic;
use std::time::Instant;

use possnet::compile::{
    compile_network, conditional_possibility, hidden_parent_closure,
    parents_at_stage, stage_bases, Ordering,
};
use possnet::io::parse_base;
use possnet::marginalize::{decompose_check, instantiate, marginal_base};
use possnet::model::{Clause, Formula, FormulaBase, Literal, Var, Weight, WeightedBase};
use possnet::network::{check_normalization, network_distribution_over, Network};
use possnet::normalize::{remove_subsumed, remove_tautologies, to_clausal};
use possnet::oracle::{
    distributions_equal, enumerate_distribution, numbered_vars, random_base, random_ordering,
    random_raw_base,
};
use possnet::semantics::{base_of_distribution, distribution_of_base, inconsistency_degree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SIGMA_EX: &str = "vars su wi se\n2/3: su | !wi\n1/3: !wi | se\n1/3: wi | !se\n1/3: su | se\n";
const POOL: [&str; 7] = ["1/5", "1/3", "2/5", "1/2", "2/3", "7/10", "1"];

fn w(s: &str) -> Weight {
    s.parse().unwrap()
}

fn v(s: &str) -> Var {
    Var::new(s).unwrap()
}

fn l(s: &str) -> Literal {
    match s.strip_prefix('!') {
        Some(n) => v(n).neg(),
        None => v(s).pos(),
    }
}

fn c(lits: &[&str]) -> Clause {
    lits.iter().map(|s| l(s)).collect()
}

fn pool() -> Vec<Weight> {
    POOL.iter().map(|s| w(s)).collect()
}

fn sigma_ex() -> WeightedBase {
    to_clausal(&parse_base(SIGMA_EX).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// ω0..ω7 with ω0 = su ¬wi ¬se, bits (¬su, wi, se) from most significant.
fn omega_index(d: &possnet::Distribution) -> Vec<Weight> {
    let d = d.aligned_to(&[v("su"), v("wi"), v("se")]).unwrap();
    (0..8u64)
        .map(|k| {
            let bits = (k & 4 == 0) as u64 | ((k & 2 != 0) as u64) << 1 | ((k & 1 != 0) as u64) << 2;
            d.at(bits).clone()
        })
        .collect()
}

fn ws(list: &[&str]) -> Vec<Weight> {
    list.iter().map(|s| w(s)).collect()
}

fn sorted_entries(b: &WeightedBase) -> Vec<(Clause, Weight)> {
    let mut e = b.entries().to_vec();
    e.sort();
    e
}

fn criterion_1() -> Outcome {
    let got = omega_index(&distribution_of_base(&sigma_ex()));
    let expected = ws(&["1", "2/3", "2/3", "1", "2/3", "2/3", "1/3", "1/3"]);
    ensure(got == expected, || format!("got {got:?}"))?;
    Ok("π(ω0..ω7) = 1, 2/3, 2/3, 1, 2/3, 2/3, 1/3, 1/3".into())
}

fn criterion_2() -> Outcome {
    let (on, off) = decompose_check(&sigma_ex(), &v("se"));
    let on_got = omega_index(&on);
    let off_got = omega_index(&off);
    ensure(on_got == ws(&["0", "2/3", "0", "1", "0", "2/3", "0", "1/3"]), || format!("π_se = {on_got:?}"))?;
    ensure(off_got == ws(&["1", "0", "2/3", "0", "2/3", "0", "1/3", "0"]), || format!("π_¬se = {off_got:?}"))?;
    let full = omega_index(&distribution_of_base(&sigma_ex()));
    for k in 0..8 {
        let m = on_got[k].clone().max(off_got[k].clone());
        ensure(m == full[k], || format!("max differs at ω{k}"))?;
    }
    Ok("π_se, π_¬se exact; pointwise max = π".into())
}

fn criterion_3() -> Outcome {
    let b = sigma_ex();
    let on = instantiate(&b, &l("se"));
    let off = instantiate(&b, &l("!se"));
    let mut exp_on = vec![(c(&["wi"]), w("1/3")), (c(&["su", "!wi"]), w("2/3"))];
    exp_on.sort();
    let mut exp_off = vec![(c(&["!wi"]), w("1/3")), (c(&["su"]), w("1/3")), (c(&["su", "!wi"]), w("2/3"))];
    exp_off.sort();
    ensure(sorted_entries(&on) == exp_on, || format!("Σ1 = {:?}", on.entries()))?;
    ensure(sorted_entries(&off) == exp_off, || format!("Σ2 = {:?}", off.entries()))?;

    // instantiations encode the conditioned marginals (values over su, wi)
    let su_wi = [v("su"), v("wi")];
    let cells = |d: &possnet::Distribution| -> Vec<Weight> {
        let d = d.aligned_to(&su_wi).unwrap();
        // (su wi), (su ¬wi), (¬su ¬wi), (¬su wi)
        [0b11u64, 0b01, 0b00, 0b10].iter().map(|&b| d.at(b).clone()).collect()
    };
    let on_vals = cells(&distribution_of_base(&on));
    let off_vals = cells(&distribution_of_base(&off));
    ensure(on_vals == ws(&["1", "2/3", "2/3", "1/3"]), || format!("π^SE_se = {on_vals:?}"))?;
    ensure(off_vals == ws(&["2/3", "1", "2/3", "1/3"]), || format!("π^SE_¬se = {off_vals:?}"))?;

    let m = marginal_base(&b, &v("se"));
    ensure(!m.vars().contains(&v("se")), || "se still in universe".into())?;
    let reference = WeightedBase::new(
        su_wi.to_vec(),
        [(c(&["su"]), w("1/3")), (c(&["su", "!wi"]), w("2/3"))],
    )
    .unwrap();
    let dm = distribution_of_base(&m);
    ensure(
        distributions_equal(&distribution_of_base(&reference), &dm).map_err(|e| e.to_string())?,
        || format!("Σ_C = {:?}", m.entries()),
    )?;
    let marg = cells(&dm);
    ensure(marg == ws(&["1", "1", "2/3", "1/3"]), || format!("marginal = {marg:?}"))?;
    Ok(format!("Σ1, Σ2 exact; Σ_C = {:?} ≡ {{(su,1/3),(su|!wi,2/3)}}", m.entries()))
}

fn criterion_4() -> Outcome {
    let b = to_clausal(&parse_base(".4: a2 | a1\n.7: a3").unwrap());
    let p1 = conditional_possibility(&b, &l("!a1"), &[l("!a2")]);
    let p2 = conditional_possibility(&b, &l("!a1"), &[l("!a2"), l("!a3")]);
    ensure(p1 == w("3/5"), || format!("Π(¬a1|¬a2) = {p1}"))?;
    ensure(p2 == Weight::one(), || format!("Π(¬a1|¬a2¬a3) = {p2}"))?;
    let seed: BTreeSet<Var> = [v("a2")].into();
    let parents = hidden_parent_closure(&b, &v("a1"), &seed);
    let expected: BTreeSet<Var> = [v("a2"), v("a3")].into();
    ensure(parents == expected, || format!("parents = {parents:?}"))?;
    Ok("Π(¬a1|¬a2) = 3/5, Π(¬a1|¬a2¬a3) = 1, Par(A1) = {A2, A3}".into())
}

fn compiled_sigma_ex() -> Network {
    let b = sigma_ex();
    compile_network(&b, &Ordering::new(vec![v("se"), v("wi"), v("su")], b.vars()).unwrap()).unwrap()
}

fn criterion_5(networks: &mut Vec<Network>) -> Outcome {
    let n = compiled_sigma_ex();
    let parents = |x: &str| n.node(&v(x)).unwrap().parents().to_vec();
    ensure(parents("se") == vec![v("wi"), v("su")], || format!("Par(SE) = {:?}", parents("se")))?;
    ensure(parents("wi") == vec![v("su")], || format!("Par(WI) = {:?}", parents("wi")))?;
    ensure(parents("su").is_empty(), || format!("Par(SU) = {:?}", parents("su")))?;

    let cell = |x: &str, pol: bool, ctx: &[&str]| -> Weight {
        let cpt = n.node(&v(x)).unwrap();
        let lits: Vec<Literal> = ctx.iter().map(|s| l(s)).collect();
        cpt.get(cpt.column_of(&lits).unwrap(), pol).clone()
    };
    let mut checked = 0;
    let mut expect = |got: Weight, want: &str, what: &str| -> Result<(), String> {
        checked += 1;
        ensure(got == w(want), || format!("{what} = {got}, expected {want}"))
    };
    expect(cell("su", true, &[]), "1", "Π(su)")?;
    expect(cell("su", false, &[]), "2/3", "Π(¬su)")?;
    expect(cell("wi", true, &["!su"]), "1/2", "Π(wi|¬su)")?;
    expect(cell("wi", true, &["su"]), "1", "Π(wi|su)")?;
    expect(cell("wi", false, &["!su"]), "1", "Π(¬wi|¬su)")?;
    expect(cell("wi", false, &["su"]), "1", "Π(¬wi|su)")?;
    for (wi, su) in [("!wi", "su"), ("!wi", "!su"), ("wi", "su"), ("wi", "!su")] {
        let se = if (wi, su) == ("!wi", "su") { "2/3" } else { "1" };
        let not_se = if (wi, su) == ("wi", "su") { "2/3" } else { "1" };
        expect(cell("se", true, &[wi, su]), se, &format!("Π(se|{wi},{su})"))?;
        expect(cell("se", false, &[wi, su]), not_se, &format!("Π(¬se|{wi},{su})"))?;
    }
    ensure(checked == 14, || format!("checked {checked} cells"))?;
    networks.push(n);
    Ok("parent sets and all 14 table cells exact".into())
}

fn permutations(items: &[Var]) -> Vec<Vec<Var>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

fn round_trip(b: &WeightedBase, order: Vec<Var>) -> Result<Network, String> {
    let o = Ordering::new(order.clone(), b.vars()).map_err(|e| e.to_string())?;
    let n = compile_network(b, &o).map_err(|e| e.to_string())?;
    let expected = enumerate_distribution(b).map_err(|e| e.to_string())?;
    let got = network_distribution_over(&n, b.vars()).map_err(|e| e.to_string())?;
    ensure(expected == got, || format!("base {:?} under {order:?}", b.entries()))?;
    Ok(n)
}

fn criterion_6(networks: &mut Vec<Network>) -> Outcome {
    let b = sigma_ex();
    let orders = permutations(b.vars());
    ensure(orders.len() == 6, || "expected 6 orderings".into())?;
    for o in orders {
        networks.push(round_trip(&b, o)?);
    }
    let pool = pool();
    let mut runs = 0;
    let mut bases = 0;
    let mut max_vars = 0;
    let mut max_clauses = 0;
    for seed in 0..500u64 {
        let (n_vars, n_clauses) = shape(seed);
        let b = random_base(seed, n_vars, n_clauses, &pool).map_err(|e| e.to_string())?;
        bases += 1;
        max_vars = max_vars.max(n_vars);
        max_clauses = max_clauses.max(n_clauses);
        for k in 0..3u64 {
            let order = random_ordering(seed * 31 + k, b.vars());
            networks.push(round_trip(&b, order)?);
            runs += 1;
        }
    }
    ensure(bases >= 500 && max_vars == 6 && max_clauses == 12, || "coverage".into())?;
    Ok(format!("Σ_ex × 6 orderings, {bases} random bases × 3 orderings ({runs} compilations) exact"))
}

/// Variable and clause counts for consistent random bases. Small universes get
/// fewer clauses, otherwise a consistent draw is vanishingly rare.
fn shape(seed: u64) -> (usize, usize) {
    let n_vars = 1 + (seed % 6) as usize;
    let room = (2 * n_vars + 1).min(12) as u64;
    (n_vars, 1 + (seed / 6 % room) as usize)
}

/// Random formula over `vars` up to `depth`.
fn random_formula(rng: &mut ChaCha8Rng, vars: &[Var], depth: u32) -> Formula {
    let leaf = |rng: &mut ChaCha8Rng| {
        if rng.gen_ratio(1, 12) {
            Formula::Const(rng.gen_bool(0.5))
        } else {
            let x = &vars[rng.gen_range(0..vars.len())];
            Formula::Lit(Literal::new(x.clone(), rng.gen_bool(0.5)))
        }
    };
    if depth == 0 || rng.gen_ratio(1, 3) {
        return leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => Formula::negation(random_formula(rng, vars, depth - 1)),
        1 => Formula::And((0..rng.gen_range(2..=3)).map(|_| random_formula(rng, vars, depth - 1)).collect()),
        _ => Formula::Or((0..rng.gen_range(2..=3)).map(|_| random_formula(rng, vars, depth - 1)).collect()),
    }
}

fn criterion_7() -> Outcome {
    let pool = pool();
    let err = |e: possnet::Error| e.to_string();
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let n_vars = 1 + (seed % 6) as usize;
        let vars = numbered_vars(n_vars);

        // general formulas through clausal conversion
        let fb = FormulaBase::new(
            vars.clone(),
            (0..rng.gen_range(1..=5)).map(|_| {
                (random_formula(&mut rng, &vars, 3), pool[rng.gen_range(0..pool.len())].clone())
            }),
        )
        .map_err(err)?;
        let clausal = to_clausal(&fb);
        let reference = enumerate_distribution(&fb).map_err(err)?;
        ensure(distribution_of_base(&clausal) == reference, || format!("to_clausal, seed {seed}"))?;
        ensure(enumerate_distribution(&clausal).map_err(err)? == reference, || format!("to_clausal/oracle, seed {seed}"))?;

        // clause passes on a raw base salted with tautologies and duplicates
        let raw = random_raw_base(seed, n_vars, 1 + (seed % 12) as usize, &pool).map_err(err)?;
        let mut extra: Vec<(Clause, Weight)> = Vec::new();
        let x = &vars[rng.gen_range(0..n_vars)];
        extra.push((Clause::new([x.pos(), x.neg()]), pool[rng.gen_range(0..pool.len())].clone()));
        if let Some((dup, _)) = raw.entries().first() {
            extra.push((dup.clone(), pool[rng.gen_range(0..pool.len())].clone()));
        }
        let salted = raw.extended(extra);
        let reference = enumerate_distribution(&salted).map_err(err)?;
        let no_taut = remove_tautologies(&salted);
        ensure(no_taut.entries().iter().all(|(c, _)| !c.is_tautology()), || "tautology survived".into())?;
        ensure(enumerate_distribution(&no_taut).map_err(err)? == reference, || format!("remove_tautologies, seed {seed}"))?;
        let reduced = remove_subsumed(&no_taut);
        ensure(enumerate_distribution(&reduced).map_err(err)? == reference, || format!("remove_subsumed, seed {seed}"))?;
        ensure(remove_subsumed(&reduced) == reduced, || format!("remove_subsumed not idempotent, seed {seed}"))?;

        // converse transformation on the (normalized) distribution of a consistent base
        let consistent = random_base(seed, n_vars, shape(seed).1, &pool).map_err(err)?;
        let d = distribution_of_base(&consistent);
        let back = base_of_distribution(&d).map_err(err)?;
        ensure(enumerate_distribution(&back).map_err(err)? == d, || format!("base_of_distribution, seed {seed}"))?;
    }
    Ok("to_clausal, remove_tautologies, remove_subsumed, base_of_distribution ∘ distribution_of_base on 500 bases each".into())
}

fn criterion_8() -> Outcome {
    let pool = pool();
    let mut inconsistent = 0;
    for seed in 0..600u64 {
        let n_vars = 1 + (seed % 6) as usize;
        let n_clauses = 1 + (seed % 13) as usize + (seed % 3) as usize * 4;
        let b = random_raw_base(20_000 + seed, n_vars, n_clauses, &pool).map_err(|e| e.to_string())?;
        let inc = inconsistency_degree(&b);
        let by_enum = enumerate_distribution(&b).map_err(|e| e.to_string())?.max_value().complement();
        ensure(inc == by_enum, || format!("seed {seed}: Inc {inc} vs {by_enum}"))?;
        if !inc.is_zero() {
            inconsistent += 1;
        }
    }
    ensure(inconsistent >= 50, || format!("only {inconsistent} inconsistent bases drawn"))?;
    Ok(format!("600 raw bases ({inconsistent} inconsistent): Inc = 1 - max π"))
}

fn criterion_9(networks: &[Network]) -> Outcome {
    for (i, n) in networks.iter().enumerate() {
        let report = check_normalization(n);
        ensure(report.is_ok(), || format!("network #{i}: {}", report.violations[0]))?;
    }
    Ok(format!("{} compiled networks normalized", networks.len()))
}

fn criterion_10() -> Outcome {
    let pool = pool();
    let mut checks = 0usize;
    for seed in 0..120u64 {
        let n_vars = 2 + (seed % 4) as usize;
        let b = random_base(30_000 + seed, n_vars, 2 + (seed % 9) as usize, &pool).map_err(|e| e.to_string())?;
        let o = Ordering::new(random_ordering(seed, b.vars()), b.vars()).map_err(|e| e.to_string())?;
        let stages = stage_bases(&b, &o).map_err(|e| e.to_string())?;
        for (i, (var, stage)) in o.vars().iter().zip(&stages).enumerate() {
            let parents = parents_at_stage(stage, var, &o).parents;
            let rest: Vec<Var> = o.vars()[i + 1..].iter().filter(|u| !parents.contains(u)).cloned().collect();
            for x_bits in 0..1usize << parents.len() {
                let x: Vec<Literal> = parents
                    .iter()
                    .enumerate()
                    .map(|(j, p)| Literal::new(p.clone(), x_bits & (1 << j) != 0))
                    .collect();
                if context_possibility(stage, &x).is_zero() {
                    continue;
                }
                for c_bits in 0..1usize << rest.len() {
                    let mut xc = x.clone();
                    xc.extend(rest.iter().enumerate().map(|(j, r)| Literal::new(r.clone(), c_bits & (1 << j) != 0)));
                    if context_possibility(stage, &xc).is_zero() {
                        continue;
                    }
                    for lit in [var.pos(), var.neg()] {
                        let short = conditional_possibility(stage, &lit, &x);
                        let long = conditional_possibility(stage, &lit, &xc);
                        ensure(short == long, || {
                            format!("seed {seed}, Π({lit}|{x:?}) = {short} but Π({lit}|{xc:?}) = {long}")
                        })?;
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!("120 bases, {checks} conditional comparisons"))
}

fn context_possibility(b: &WeightedBase, ctx: &[Literal]) -> Weight {
    inconsistency_degree(&b.extended(ctx.iter().map(|l| (Clause::unit(l.clone()), Weight::one())))).complement()
}

fn run(id: u32, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(panic::AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    let (tag, detail) = match outcome {
        Ok(detail) => ("PASS", detail),
        Err(why) => ("FAIL", why),
    };
    println!("{tag}  criterion {id:>2}: {name}: {detail} ({secs:.2}s)");
    tag == "PASS"
}

fn main() {
    let mut networks = Vec::new();
    let mut ok = true;
    ok &= run(1, "distribution of the sun/wind/sea base", criterion_1);
    ok &= run(2, "decomposition on se", criterion_2);
    ok &= run(3, "instantiation and marginal base on se", criterion_3);
    ok &= run(4, "hidden parent and conditionals (a1, a2, a3)", criterion_4);
    ok &= run(5, "sun/wind/sea network structure and tables", || criterion_5(&mut networks));
    ok &= run(6, "chain-rule joint equals base distribution", || criterion_6(&mut networks));
    ok &= run(7, "equivalence-preserving passes", criterion_7);
    ok &= run(8, "inconsistency degree vs enumeration", criterion_8);
    ok &= run(9, "table normalization", || criterion_9(&networks));
    ok &= run(10, "Markov property of parent sets", criterion_10);
    if !ok {
        std::process::exit(1);
    }
}
