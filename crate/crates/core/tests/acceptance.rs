//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Reference values come from two places: published counts, written out as
//! literals, and small oracles defined at the bottom of this file that
//! recompute a quantity without going through the library code under test.

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lpmq_core::lpm::{is_quotient, is_quotient_oracle};
use lpmq_core::perm::{
    self, count_c_sigma, count_falling, dual_chain, fc_k_perm, fc_k_poset, left_weak_leq, lehmer,
    list_falling, Perm, PermPair,
};
use lpmq_core::poset::build_poset;
use lpmq_core::shelling::{
    falling_chains, mobius_via_falling, order_complex_facets, reduced_euler_characteristic,
    shelling_check, verify_el, verify_el_rooted, Linearization, ShellingOutcome,
};
use lpmq_core::whitney::{unique_sinks, verify_ew, verify_whitney_duality, whitney_dual};
use lpmq_core::{Lpm, QuotientPoset};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const FALLING: [u64; 9] = [1, 2, 6, 25, 140, 1031, 9784, 117212, 1737600];
const CHAINS: [u128; 7] = [1, 3, 17, 152, 1949, 33774, 759391];

fn falling_table() -> Check {
    for (i, &want) in FALLING.iter().enumerate() {
        let n = i + 1;
        let got = lib(count_falling(n))?;
        ensure!(got == want, "n={n}: {got} != {want}");
    }
    Ok("n = 1..9".into())
}

fn chain_table() -> Check {
    for (i, &want) in CHAINS.iter().enumerate() {
        let n = i + 1;
        let p = lib(build_poset(n))?;
        let got = p.count_maximal_chains();
        ensure!(got == want, "n={n}: {got} != {want}");
        if n <= 4 {
            let brute = oracle::count_chains(&p);
            ensure!(brute == want, "n={n}: path enumeration gives {brute}");
        }
    }
    Ok("n = 1..7".into())
}

fn mobius_agreement() -> Check {
    let p4 = lib(build_poset(4))?;
    let mut intervals = 0;
    for (x, y) in p4.comparable_pairs() {
        let mu = lib(p4.mobius(x, y))?;
        let hall = lib(p4.mobius_hall(x, y))?;
        let falling = lib(mobius_via_falling(&p4, x, y))?;
        ensure!(
            mu == hall && mu == falling,
            "[{x},{y}]: recursion {mu}, chains {hall}, falling {falling}"
        );
        if x != y {
            let chi = lib(reduced_euler_characteristic(&p4, x, y))?;
            ensure!(
                mu == chi,
                "[{x},{y}]: reduced Euler characteristic {chi} != {mu}"
            );
        }
        intervals += 1;
    }
    let p5 = lib(build_poset(5))?;
    let (b, t) = (p5.bottom(), p5.top());
    let mu5 = lib(p5.mobius(b, t))?;
    ensure!(
        mu5 == lib(p5.mobius_hall(b, t))?,
        "P_5 chain counting differs"
    );
    ensure!(
        mu5 == lib(mobius_via_falling(&p5, b, t))?,
        "P_5 falling differs"
    );
    ensure!(mu5 == -140, "mu(P_5) = {mu5}");
    let p3 = lib(build_poset(3))?;
    let mu3 = lib(p3.mobius(p3.bottom(), p3.top()))?;
    let mu4 = lib(p4.mobius(p4.bottom(), p4.top()))?;
    ensure!(mu3.abs() == 6 && mu4.abs() == 25, "|mu| = {mu3}, {mu4}");
    Ok(format!("{intervals} intervals of P_4 and [0,1] of P_5"))
}

fn el_verification() -> Check {
    let mut total = 0;
    for lin in [Linearization::LowerFirst, Linearization::UpperFirst] {
        for n in 1..=4 {
            let p = lib(build_poset(n))?;
            let r = verify_el(&p, lin);
            ensure!(r.is_ok(), "n={n} {lin:?}: {:?}", r.violations().next());
            ensure!(
                r.len() == p.comparable_pairs().len(),
                "n={n}: missing intervals"
            );
            total += r.len();
        }
        let p5 = lib(build_poset(5))?;
        let r = verify_el_rooted(&p5, lin);
        ensure!(r.is_ok(), "n=5 {lin:?}: {:?}", r.violations().next());
        total += r.len();
    }
    Ok(format!("{total} intervals, both linearizations"))
}

fn shelling() -> Check {
    for n in 1..=5 {
        let p = lib(build_poset(n))?;
        let facets = order_complex_facets(&p, Linearization::LowerFirst);
        ensure!(
            facets.len() as u128 == p.count_maximal_chains(),
            "n={n}: facet count"
        );
        let outcome = lib(shelling_check(&facets))?;
        ensure!(outcome.is_shelling(), "n={n}: {outcome:?}");
        ensure!(
            oracle::is_shelling(&facets),
            "n={n}: oracle rejects the order"
        );
    }
    let p3 = lib(build_poset(3))?;
    let mut facets = order_complex_facets(&p3, Linearization::LowerFirst);
    let ends: BTreeSet<usize> = [p3.bottom(), p3.top()].into();
    let far = (1..facets.len())
        .find(|&j| {
            let a: BTreeSet<usize> = facets[0].iter().copied().collect();
            let b: BTreeSet<usize> = facets[j].iter().copied().collect();
            a.intersection(&b).copied().collect::<BTreeSet<_>>() == ends
        })
        .ok_or("no facet meets the first only in its endpoints")?;
    facets.swap(1, far);
    ensure!(
        !oracle::is_shelling(&facets),
        "oracle accepts the adversarial order"
    );
    match lib(shelling_check(&facets))? {
        ShellingOutcome::Failure(f) => {
            ensure!(
                f.facet == 1
                    && f.earlier == 0
                    && f.shared == ends.iter().copied().collect::<Vec<_>>(),
                "unexpected witness {f:?}"
            );
            Ok(format!(
                "n <= 5 lex orders shell; adversarial witness facet {} / {}",
                f.facet, f.earlier
            ))
        }
        ShellingOutcome::Shelling => Err("adversarial order accepted".into()),
    }
}

fn ew_verification() -> Check {
    let mut findings = 0;
    for n in 1..=4 {
        let p = lib(build_poset(n))?;
        let r = verify_ew(&p);
        ensure!(r.is_ok(), "n={n}: {:?}", r.violations().next());
        findings += r.len();
        let q = lib(whitney_dual(&p))?;
        ensure!(unique_sinks(&q), "n={n}: a class without a unique sink");
        let sinks: HashSet<String> = q
            .top_classes()
            .into_iter()
            .map(|k| q.chains().chain(q.sinks(k)[0]).word())
            .collect();
        let falling: HashSet<String> = lib(falling_chains(&p, p.bottom(), p.top()))?
            .into_iter()
            .map(|c| c.word())
            .collect();
        ensure!(sinks == falling, "n={n}: sinks differ from falling chains");
    }
    Ok(format!("n <= 4, {findings} findings"))
}

fn whitney() -> Check {
    let p3 = lib(build_poset(3))?;
    let q3 = lib(whitney_dual(&p3))?;
    ensure!(
        q3.rank_polynomial().coefficients() == [1, 6, 11, 6],
        "Q_3 rank polynomial {}",
        q3.rank_polynomial()
    );
    ensure!(
        q3.characteristic_polynomial().coefficients() == [1, -6, 6, -1],
        "Q_3 characteristic polynomial {}",
        q3.characteristic_polynomial()
    );
    for n in 1..=4 {
        let p = lib(build_poset(n))?;
        let q = lib(whitney_dual(&p))?;
        ensure!(verify_whitney_duality(&p, &q), "n={n}");
        let mu = oracle::mobius_by_recursion(&p);
        let want: Vec<i64> = (0..=n)
            .map(|r| {
                (0..p.len())
                    .filter(|&x| p.rank(x) == r)
                    .map(|x| mu[x])
                    .sum::<i64>()
                    .abs()
            })
            .collect();
        ensure!(
            q.rank_polynomial().coefficients() == want,
            "n={n}: rank numbers {} vs {want:?}",
            q.rank_polynomial()
        );
    }
    Ok("Q_3 polynomials exact; duality n <= 4".into())
}

fn closed_form() -> Check {
    ensure!(lib(perm::closed_form_siw0(4, 2))? == 1, "instance (4,2)");
    let mut cases = 0;
    for n in 3..=6 {
        for i in 2..n {
            let sigma = lib(perm::siw0(n, i))?;
            let want = oracle::c_sigma(&sigma);
            let dfs = count_c_sigma(&sigma);
            let closed = lib(perm::closed_form_siw0(n, i))?;
            ensure!(
                dfs == want && closed == want as i128,
                "n={n} i={i}: oracle {want}, search {dfs}, closed form {closed}"
            );
            cases += 1;
        }
    }
    Ok(format!("{cases} cases, n <= 6"))
}

fn properties() -> Check {
    // Lehmer identity L_j(w) - L'_{w(j)}(w) = w(j) - j
    let identity = |w: &Perm| -> bool {
        let l = lehmer(w);
        (1..=w.len()).all(|j| {
            l.code[j - 1] as i64 - l.cocode[w.at(j) - 1] as i64 == w.at(j) as i64 - j as i64
        })
    };
    for n in 1..=5 {
        for w in Perm::all(n) {
            ensure!(identity(&w), "Lehmer identity fails at {w}");
            ensure!(oracle::lehmer(&w) == lehmer(&w).code, "Lehmer code of {w}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut samples = 0;
    for n in 6..=8 {
        let mut v: Vec<usize> = (1..=n).collect();
        for _ in 0..4000 {
            v.shuffle(&mut rng);
            let w = lib(Perm::new(v.clone()))?;
            ensure!(identity(&w), "Lehmer identity fails at {w}");
            samples += 1;
        }
    }

    for n in 1..=5 {
        let all = Lpm::all(n);
        let p = lib(build_poset(n))?;
        for a in &all {
            for b in &all {
                let fast = lib(is_quotient(a, b))?;
                ensure!(fast == lib(is_quotient_oracle(a, b))?, "{a} <= {b}");
                let (ia, ib) = (p.index_of(a).unwrap(), p.index_of(b).unwrap());
                ensure!(fast == p.leq(ia, ib), "Hasse order differs at {a} <= {b}");
            }
        }
    }

    for n in 1..=5 {
        let perms = Perm::all(n);
        let counts: Vec<u64> = perms.iter().map(count_c_sigma).collect();
        for pair in lib(list_falling(n))? {
            let d = dual_chain(&pair);
            ensure!(
                oracle::is_falling(&d.sigma, &d.tau),
                "dual of {pair} not falling"
            );
            ensure!(
                dual_chain(&d) == pair,
                "duality is not an involution at {pair}"
            );
        }
        for (i, s) in perms.iter().enumerate() {
            let conj = s.conjugate_by_longest();
            let j = perms.binary_search(&conj).unwrap();
            ensure!(counts[i] == counts[j], "|C_{s}| != |C_{conj}|");
            for (k, w) in perms.iter().enumerate() {
                if lib(left_weak_leq(s, w))? {
                    ensure!(
                        counts[i] <= counts[k],
                        "|C_{s}| > |C_{w}| with {s} <=_L {w}"
                    );
                }
            }
        }
    }

    for n in 1..=6 {
        let mut total = 0;
        for s in Perm::all(n) {
            let c = count_c_sigma(&s);
            if c > 0 {
                ensure!(
                    s.at(1) == n && s.at(n) == 1,
                    "falling chains with lower labels {s}"
                );
            }
            total += c;
        }
        ensure!(total == lib(count_falling(n))?, "n={n}: sum over sigma");
        for pair in lib(list_falling(n))? {
            ensure!(
                pair.sigma.at(1) == n && pair.sigma.at(n) == 1,
                "falling pair {pair}"
            );
        }
    }

    for n in 1..=6 {
        let p = lib(build_poset(n))?;
        let fc: Vec<u64> = (1..=n)
            .map(|k| lib(fc_k_poset(&p, k)))
            .collect::<Result<_, _>>()?;
        for k in 1..=n {
            ensure!(
                fc[k - 1] == lib(fc_k_perm(n, k))?,
                "n={n} k={k}: poset and permutation routes differ"
            );
        }
        ensure!(fc.windows(2).all(|w| w[0] <= w[1]), "n={n}: fc_k = {fc:?}");
        ensure!(
            fc.iter().sum::<u64>() == lib(count_falling(n))?,
            "n={n}: sum of fc_k"
        );
        if n >= 2 {
            ensure!(fc[0] == lib(count_falling(n - 1))?, "n={n}: fc_1");
        }
    }

    for n in 1..=7 {
        let (a, b) = (lib(count_falling(n))?, lib(count_falling(n + 1))?);
        ensure!(b >= (n as u64 + 1) * a, "n={n}: {b} < {} * {a}", n + 1);
    }

    for n in 1..=8 {
        let p = lib(build_poset(n))?;
        ensure!(
            p.len() as u64 == oracle::catalan(n + 1),
            "|P_{n}| = {}",
            p.len()
        );
    }
    Ok(format!(
        "{samples} random permutations, exhaustive n <= 5/6/8"
    ))
}

fn cross_representation() -> Check {
    for n in 1..=5 {
        let p = lib(build_poset(n))?;
        let from_poset: BTreeSet<PermPair> = lib(falling_chains(&p, p.bottom(), p.top()))?
            .iter()
            .map(|c| c.to_perm_pair())
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let from_perms: BTreeSet<PermPair> = lib(list_falling(n))?.into_iter().collect();
        ensure!(from_poset == from_perms, "n={n}: the two sets differ");
        let brute: BTreeSet<PermPair> = oracle::falling_pairs(n);
        ensure!(
            brute == from_perms,
            "n={n}: brute force over S_n x S_n differs"
        );
    }
    let listed: HashSet<PermPair> = lib(list_falling(5))?.into_iter().collect();
    for tau in ["24351", "14352", "14253", "13254", "13245"] {
        let pair = PermPair::new(lib("53421".parse())?, lib(tau.parse())?).unwrap();
        ensure!(listed.contains(&pair), "{pair} missing");
    }
    Ok("n <= 5".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("falling-chain counts", falling_table),
        ("maximal-chain counts", chain_table),
        ("Mobius triple agreement", mobius_agreement),
        ("EL verification", el_verification),
        ("shelling", shelling),
        ("EW verification", ew_verification),
        ("Whitney dual", whitney),
        ("closed form for s_i w_0", closed_form),
        ("property suites", properties),
        ("cross-representation", cross_representation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Independent reference computations.
mod oracle {
    use super::*;

    pub fn catalan(n: usize) -> u64 {
        // C_n = binom(2n, n) / (n + 1)
        let mut b: u64 = 1;
        for k in 0..n as u64 {
            b = b * (2 * n as u64 - k) / (k + 1);
        }
        b / (n as u64 + 1)
    }

    pub fn lehmer(w: &Perm) -> Vec<usize> {
        let v = w.values();
        (0..v.len())
            .map(|j| (j + 1..v.len()).filter(|&k| v[k] < v[j]).count())
            .collect()
    }

    /// Falling pair test written out from the Lehmer-code inequalities and
    /// the ascent condition.
    pub fn is_falling(sigma: &Perm, tau: &Perm) -> bool {
        let n = sigma.len();
        let (ls, lt) = (lehmer(sigma), lehmer(tau));
        let (cs, ct) = (lehmer(&sigma.inverse()), lehmer(&tau.inverse()));
        let chain =
            (1..=n).all(|j| ls[j - 1] >= lt[j - 1] && cs[sigma.at(j) - 1] >= ct[tau.at(j) - 1]);
        let disjoint =
            (1..n).all(|i| !(sigma.at(i) < sigma.at(i + 1) && tau.at(i) < tau.at(i + 1)));
        chain && disjoint
    }

    pub fn c_sigma(sigma: &Perm) -> u64 {
        Perm::all(sigma.len())
            .iter()
            .filter(|t| is_falling(sigma, t))
            .count() as u64
    }

    pub fn falling_pairs(n: usize) -> BTreeSet<PermPair> {
        let all = Perm::all(n);
        let mut out = BTreeSet::new();
        for s in &all {
            for t in &all {
                if is_falling(s, t) {
                    out.insert(PermPair::new(s.clone(), t.clone()).unwrap());
                }
            }
        }
        out
    }

    /// Maximal chains by explicit path enumeration over the Hasse diagram.
    pub fn count_chains(p: &QuotientPoset) -> u128 {
        let mut stack = vec![p.bottom()];
        let mut count = 0;
        while let Some(x) = stack.pop() {
            if x == p.top() {
                count += 1;
            }
            stack.extend(p.up_covers(x).map(|c| c.hi));
        }
        count
    }

    /// `μ(0̂, x)` for all `x`, by the recursion over `is_quotient`.
    pub fn mobius_by_recursion(p: &QuotientPoset) -> Vec<i64> {
        let elems = p.elements();
        let b = p.bottom();
        let mut mu = vec![0i64; elems.len()];
        mu[b] = 1;
        for x in 0..elems.len() {
            if x == b {
                continue;
            }
            mu[x] = -(0..elems.len())
                .filter(|&z| z != x && is_quotient(&elems[z], &elems[x]).unwrap())
                .map(|z| mu[z])
                .sum::<i64>();
        }
        mu
    }

    /// Restriction-set test: facet `F_j` is attached along the faces
    /// `F_j ∖ {v}` for `v ∈ R_j`, and every earlier facet must miss a vertex
    /// of `R_j`.
    pub fn is_shelling(facets: &[Vec<usize>]) -> bool {
        let sets: Vec<BTreeSet<usize>> =
            facets.iter().map(|f| f.iter().copied().collect()).collect();
        for j in 1..sets.len() {
            let fj = &sets[j];
            let restriction: Vec<usize> = fj
                .iter()
                .copied()
                .filter(|&v| {
                    sets[..j]
                        .iter()
                        .any(|fi| fj.iter().all(|&w| w == v || fi.contains(&w)))
                })
                .collect();
            if sets[..j]
                .iter()
                .any(|fi| restriction.iter().all(|v| fi.contains(v)))
            {
                return false;
            }
        }
        true
    }
}
