//! Classical bounds by exhaustive enumeration of deterministic strategies.
//!
//! All game weights here are rational, so every bound is computed exactly
//! with [`Ratio`] and compared against its closed form without tolerance.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scenario::JointDistribution;

pub type Q = Ratio<i64>;

/// Largest per-wing measurement count `local_bound` will enumerate.
pub const MAX_WING: usize = 14;
/// Largest cycle `ks_bound_ncycle` will enumerate.
pub const MAX_KS_CYCLE: usize = 25;

/// A 0/1 valuation of n measurements; bit m is X_m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicAssignment {
    n: usize,
    bits: u64,
}

impl DeterministicAssignment {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > 63 || bits >> n != 0 {
            return Err(Error::arg(format!(
                "{bits:#b} is not a valuation of {n} bits"
            )));
        }
        Ok(DeterministicAssignment { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn value(&self, m: usize) -> u8 {
        ((self.bits >> m) & 1) as u8
    }

    /// X̄_m = (−1)^{X_m}
    pub fn signed(&self, m: usize) -> i64 {
        1 - 2 * self.value(m) as i64
    }

    pub fn point_distribution(&self) -> JointDistribution {
        JointDistribution::point(self.n, self.bits as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsBound {
    /// Maximum fraction of anti-correlated adjacent pairs.
    pub r: Q,
    /// Minimum of Σ_a X̄_a X̄_{a⊕1}.
    pub s: i64,
    /// Lexicographically first optimal valuation.
    pub witness: DeterministicAssignment,
}

fn require_odd(n: usize) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::arg(format!("odd n ≥ 3 required, got {n}")));
    }
    Ok(())
}

/// Max-reduce (score, index) keeping the smallest index among ties.
fn better(a: (i64, u64), b: (i64, u64)) -> (i64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

pub fn ks_bound_ncycle(n: usize) -> Result<KsBound> {
    require_odd(n)?;
    if n > MAX_KS_CYCLE {
        return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_KS_CYCLE}")));
    }
    let anti = |bits: u64| -> i64 {
        let rotated = (bits >> 1) | ((bits & 1) << (n - 1));
        (bits ^ rotated).count_ones() as i64
    };
    let (best, witness) = (0..1u64 << n)
        .into_par_iter()
        .map(|bits| (anti(bits), bits))
        .reduce(|| (i64::MIN, u64::MAX), better);

    let n_i = n as i64;
    let r = Q::new(best, n_i);
    let s = n_i - 2 * best;
    if r != Q::new(n_i - 1, n_i) || s != -(n_i - 2) {
        return Err(Error::verify(format!(
            "enumerated ({r}, {s}) differs from the closed form"
        )));
    }
    Ok(KsBound {
        r,
        s,
        witness: DeterministicAssignment::new(n, witness)?,
    })
}

/// One (a, b) cell of a two-wing game; `win[2·x_a + x_b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameCell {
    pub a: usize,
    pub b: usize,
    pub weight: Q,
    pub win: [bool; 4],
}

const EQUAL: [bool; 4] = [true, false, false, true];
const DIFFER: [bool; 4] = [false, true, true, false];

/// Payoff of a two-wing game with binary outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoWingGame {
    pub na: usize,
    pub nb: usize,
    pub cells: Vec<GameCell>,
}

impl TwoWingGame {
    pub fn new(na: usize, nb: usize, cells: Vec<GameCell>) -> Result<Self> {
        if cells.iter().any(|c| c.a >= na || c.b >= nb) {
            return Err(Error::arg("game cell outside the measurement range"));
        }
        if cells.iter().any(|c| c.weight < Q::from(0)) {
            return Err(Error::arg("negative game weight"));
        }
        let total: Q = cells.iter().map(|c| c.weight).sum();
        if total != Q::from(1) {
            return Err(Error::arg(format!("game weights sum to {total}")));
        }
        Ok(TwoWingGame { na, nb, cells })
    }

    /// Equal on b = a, different on b = a⊕1 and a = b⊕1; weight 1/(3n) each.
    pub fn os_ring(n: usize) -> Result<Self> {
        require_odd(n)?;
        let w = Q::new(1, 3 * n as i64);
        let mut cells = Vec::with_capacity(3 * n);
        for a in 0..n {
            cells.push(GameCell {
                a,
                b: a,
                weight: w,
                win: EQUAL,
            });
            cells.push(GameCell {
                a,
                b: (a + 1) % n,
                weight: w,
                win: DIFFER,
            });
            cells.push(GameCell {
                a: (a + 1) % n,
                b: a,
                weight: w,
                win: DIFFER,
            });
        }
        TwoWingGame::new(n, n, cells)
    }

    /// Equal on b = a, different on b = a⊕1; weight 1/(2n) each.
    pub fn odd_cycle(n: usize) -> Result<Self> {
        require_odd(n)?;
        let w = Q::new(1, 2 * n as i64);
        let mut cells = Vec::with_capacity(2 * n);
        for a in 0..n {
            cells.push(GameCell {
                a,
                b: a,
                weight: w,
                win: EQUAL,
            });
            cells.push(GameCell {
                a,
                b: (a + 1) % n,
                weight: w,
                win: DIFFER,
            });
        }
        TwoWingGame::new(n, n, cells)
    }

    /// Winning probability given the outcome distribution of each cell
    /// (`probs(a, b)[2·x_a + x_b]`).
    pub fn evaluate(&self, mut probs: impl FnMut(usize, usize) -> [f64; 4]) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let p = probs(c.a, c.b);
                let won: f64 = (0..4).filter(|&o| c.win[o]).map(|o| p[o]).sum();
                *c.weight.numer() as f64 / *c.weight.denom() as f64 * won
            })
            .sum()
    }

    /// Same game with A's outcome at measurement `a` relabelled.
    pub fn relabel_alice(&self, a: usize) -> TwoWingGame {
        let mut g = self.clone();
        for c in g.cells.iter_mut().filter(|c| c.a == a) {
            c.win = [c.win[2], c.win[3], c.win[0], c.win[1]];
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalGame {
    Os3,
    OsRing(usize),
    OddCycle(usize),
}

impl LocalGame {
    pub fn payoff(self) -> Result<TwoWingGame> {
        match self {
            LocalGame::Os3 => TwoWingGame::os_ring(3),
            LocalGame::OsRing(n) => TwoWingGame::os_ring(n),
            LocalGame::OddCycle(n) => TwoWingGame::odd_cycle(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalBound {
    pub value: Q,
    pub alice: DeterministicAssignment,
    pub bob: DeterministicAssignment,
}

impl LocalBound {
    pub fn to_f64(&self) -> f64 {
        q_to_f64(self.value)
    }
}

pub fn q_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Maximum payoff over deterministic local strategies.
///
/// For each of A's 2^na assignments B's best response decouples per
/// measurement, so the search is exact over all 2^na × 2^nb pairs while
/// only enumerating A. Ties keep the lexicographically first pair (B's ties
/// resolve to 0).
pub fn local_bound(game: &TwoWingGame) -> Result<LocalBound> {
    if game.na > MAX_WING || game.nb > MAX_WING {
        return Err(Error::TooLarge(format!(
            "{}×{} settings exceed {MAX_WING} per wing",
            game.na, game.nb
        )));
    }
    let denom = game
        .cells
        .iter()
        .fold(1i64, |l, c| num_integer_lcm(l, *c.weight.denom()));
    let weights: Vec<i64> = game
        .cells
        .iter()
        .map(|c| c.weight.numer() * (denom / c.weight.denom()))
        .collect();

    let best_response = |alice: u64| -> (i64, u64) {
        let mut score = vec![[0i64; 2]; game.nb];
        for (c, &w) in game.cells.iter().zip(&weights) {
            let xa = ((alice >> c.a) & 1) as usize;
            for xb in 0..2 {
                if c.win[2 * xa + xb] {
                    score[c.b][xb] += w;
                }
            }
        }
        let mut bob = 0u64;
        let mut total = 0;
        for (b, s) in score.iter().enumerate() {
            if s[1] > s[0] {
                bob |= 1 << b;
            }
            total += s[0].max(s[1]);
        }
        (total, bob)
    };

    let (score, alice) = (0..1u64 << game.na)
        .into_par_iter()
        .map(|alice| (best_response(alice).0, alice))
        .reduce(|| (i64::MIN, u64::MAX), better);
    let bob = best_response(alice).1;
    Ok(LocalBound {
        value: Q::new(score, denom),
        alice: DeterministicAssignment::new(game.na, alice)?,
        bob: DeterministicAssignment::new(game.nb, bob)?,
    })
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Σ_{a=b} Ā_a B̄_b − Σ_{a≠b} Ā_a B̄_b for signed assignments of 3 settings.
fn s3_of(alice: u64, bob: u64) -> i64 {
    let mut s = 0;
    for a in 0..3 {
        for b in 0..3 {
            let prod = if ((alice >> a) ^ (bob >> b)) & 1 == 0 {
                1
            } else {
                -1
            };
            s += if a == b { prod } else { -prod };
        }
    }
    s
}

/// Local maximum of the three-setting Bell function (= 5).
pub fn s3_local_bound() -> i64 {
    (0..8u64)
        .flat_map(|a| (0..8u64).map(move |b| s3_of(a, b)))
        .max()
        .unwrap()
}

/// The same Bell function evaluated on perfectly correlated (a = b) and
/// anti-correlated (a ≠ b) outcomes: the value the nonlocal OS box needs.
pub fn s3_nonlocal_target() -> i64 {
    9
}

/// S₃ for an explicit pair of signed strategies (entries ±1).
pub fn s3_value(alice: [i64; 3], bob: [i64; 3]) -> i64 {
    let bits = |x: [i64; 3]| {
        x.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | (((v < 0) as u64) << i))
    };
    s3_of(bits(alice), bits(bob))
}

/// Diachronic guessing task: preparations (t, b), t ∈ {0,1,2}, b ∈ {0,1};
/// measurement y ∈ {0,1,2}; target c_y(t,b) = b ⊕ [y ≠ t].
pub fn diachronic_target(t: usize, b: u8, y: usize) -> u8 {
    b ^ (y != t) as u8
}

/// Guess of the deterministic strategy with encoding f (bit 2t+b holds λ)
/// and decoding g (bit 3λ+y holds the guess).
pub fn diachronic_guess(f: u8, g: u8, t: usize, b: u8, y: usize) -> u8 {
    let lam = (f >> (2 * t + b as usize)) & 1;
    (g >> (3 * lam as usize + y)) & 1
}

/// Number of the 18 contexts (t, b, y) won by (f, g).
pub fn diachronic_wins(f: u8, g: u8) -> i64 {
    let mut wins = 0;
    for t in 0..3 {
        for b in 0..2u8 {
            for y in 0..3 {
                wins += (diachronic_guess(f, g, t, b, y) == diachronic_target(t, b, y)) as i64;
            }
        }
    }
    wins
}

/// Every t yields λ = 1 for the same number of b values.
pub fn is_trit_oblivious(f: u8) -> bool {
    let ones: Vec<u8> = (0..3)
        .map(|t| ((f >> (2 * t)) & 1) + ((f >> (2 * t + 1)) & 1))
        .collect();
    ones.iter().all(|&k| k == ones[0])
}

/// Lexicographically first optimal trit-oblivious (f, g).
pub fn pnc_optimal_strategy() -> (u8, u8) {
    let mut best = (i64::MIN, 0, 0);
    for f in (0..64u8).filter(|&f| is_trit_oblivious(f)) {
        for g in 0..64u8 {
            let w = diachronic_wins(f, g);
            if w > best.0 {
                best = (w, f, g);
            }
        }
    }
    (best.1, best.2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PncBound {
    pub overall: Q,
    /// (encoding, optimum) for λ = b, c₁, c₂, c₃, in that order.
    pub per_encoding: Vec<(String, Q)>,
    /// Number of trit-oblivious encodings among the 64 maps (t,b) ↦ λ.
    pub oblivious_encodings: usize,
}

/// A deterministic encoding λ = f(t, b) is trit-oblivious iff the mixture
/// over b of its λ-distribution is the same for every t. For each such f the
/// best response g(λ, y) is found by exhaustion.
pub fn pnc_bound_diachronic() -> Result<PncBound> {
    let named: Vec<(String, u8)> = vec![
        ("b".into(), 0b000),
        ("c1".into(), 0b110),
        ("c2".into(), 0b101),
        ("c3".into(), 0b011),
    ];
    // f encoded as 6 bits: bit 2t+b
    let eval = diachronic_wins;
    let best = |f: u8| -> i64 { (0..64u8).map(|g| eval(f, g)).max().unwrap() };

    let mut overall = 0;
    let mut count = 0;
    for f in 0..64u8 {
        if is_trit_oblivious(f) {
            count += 1;
            overall = overall.max(best(f));
        }
    }
    let per_encoding = named
        .into_iter()
        .map(|(name, flips)| {
            // λ = b ⊕ s_t
            let f = (0..3).fold(0u8, |acc, t| {
                let s = (flips >> t) & 1;
                acc | (s << (2 * t)) | ((1 ^ s) << (2 * t + 1))
            });
            (name, Q::new(best(f), 18))
        })
        .collect();

    let overall = Q::new(overall, 18);
    spot_check_mixtures(overall, &eval)?;
    Ok(PncBound {
        overall,
        per_encoding,
        oblivious_encodings: count,
    })
}

/// Stochastic responses are convex mixtures of deterministic ones; sample a
/// few and confirm none beats the deterministic optimum.
fn spot_check_mixtures(bound: Q, eval: &dyn Fn(u8, u8) -> i64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let cap = q_to_f64(bound) + 1e-12;
    for _ in 0..64 {
        let f = [0b100110u8, 0b011001, 0b010110, 0b101010][rng.gen_range(0..4)];
        let mut w: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let value: f64 = (0..64u8)
            .map(|g| w[g as usize] * eval(f, g) as f64 / 18.0)
            .sum();
        if value > cap {
            return Err(Error::verify(format!(
                "mixed response reached {value} > {bound}"
            )));
        }
    }
    Ok(())
}

/// Constraints X̄_a X̄_{a⊕1} = s_a around a cycle are satisfiable iff
/// Π s_a = +1; confirmed by brute force for n ≤ 20.
pub fn algebraic_contradiction(signs: &[i8]) -> Result<bool> {
    if signs.is_empty() || signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::arg("cycle signs must be a nonempty sequence of ±1"));
    }
    let product: i64 = signs.iter().map(|&s| s as i64).product();
    let satisfiable = product == 1;
    let n = signs.len();
    if n <= 20 {
        let brute = (0..1u64 << n).any(|bits| {
            (0..n).all(|a| {
                let x = 1 - 2 * ((bits >> a) & 1) as i8;
                let y = 1 - 2 * ((bits >> ((a + 1) % n)) & 1) as i8;
                x * y == signs[a]
            })
        });
        if brute != satisfiable {
            return Err(Error::verify("parity rule disagrees with brute force"));
        }
    }
    Ok(satisfiable)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_bounds_small_cycles() {
        let b3 = ks_bound_ncycle(3).unwrap();
        assert_eq!((b3.r, b3.s), (Q::new(2, 3), -1));
        assert_eq!(b3.witness.bits(), 0b001);
        let b5 = ks_bound_ncycle(5).unwrap();
        assert_eq!((b5.r, b5.s), (Q::new(4, 5), -3));
        let b7 = ks_bound_ncycle(7).unwrap();
        assert_eq!((b7.r, b7.s), (Q::new(6, 7), -5));
        assert!(ks_bound_ncycle(4).is_err());
    }

    #[test]
    fn local_bounds_of_named_games() {
        assert_eq!(
            local_bound(&LocalGame::Os3.payoff().unwrap())
                .unwrap()
                .value,
            Q::new(7, 9)
        );
        assert_eq!(
            local_bound(&LocalGame::OsRing(5).payoff().unwrap())
                .unwrap()
                .value,
            Q::new(13, 15)
        );
        assert_eq!(
            local_bound(&LocalGame::OddCycle(5).payoff().unwrap())
                .unwrap()
                .value,
            Q::new(9, 10)
        );
    }

    #[test]
    fn witness_attains_the_bound() {
        let g = TwoWingGame::os_ring(5).unwrap();
        let lb = local_bound(&g).unwrap();
        let v = g.evaluate(|a, b| {
            let mut p = [0.0; 4];
            p[2 * lb.alice.value(a) as usize + lb.bob.value(b) as usize] = 1.0;
            p
        });
        assert!((v - lb.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn oversize_game_rejected() {
        let g = TwoWingGame::new(
            15,
            1,
            vec![GameCell {
                a: 0,
                b: 0,
                weight: Q::from(1),
                win: EQUAL,
            }],
        )
        .unwrap();
        assert!(matches!(local_bound(&g), Err(Error::TooLarge(_))));
    }

    #[test]
    fn bad_weights_rejected() {
        let cell = GameCell {
            a: 0,
            b: 0,
            weight: Q::new(1, 2),
            win: EQUAL,
        };
        assert!(TwoWingGame::new(1, 1, vec![cell]).is_err());
    }

    #[test]
    fn s3_values() {
        assert_eq!(s3_local_bound(), 5);
        assert_eq!(s3_value([1; 3], [1; 3]), -3);
        assert_eq!(s3_nonlocal_target(), 9);
        // R₃ = (S₃ + 9)/18 links the two forms of the bound
        assert_eq!(Q::new(s3_local_bound() + 9, 18), Q::new(7, 9));
    }

    #[test]
    fn pnc_bound_and_encodings() {
        let p = pnc_bound_diachronic().unwrap();
        assert_eq!(p.overall, Q::new(7, 9));
        let vals: Vec<Q> = p.per_encoding.iter().map(|(_, q)| *q).collect();
        assert_eq!(
            vals,
            vec![Q::new(2, 3), Q::new(7, 9), Q::new(7, 9), Q::new(7, 9)]
        );
        assert_eq!(p.oblivious_encodings, 10);
    }

    #[test]
    fn algebraic_contradiction_examples() {
        assert!(!algebraic_contradiction(&[-1, -1, -1]).unwrap());
        assert!(algebraic_contradiction(&[-1, -1, 1]).unwrap());
        assert!(!algebraic_contradiction(&[1, -1, -1, -1]).unwrap());
        assert!(algebraic_contradiction(&[2]).is_err());
    }
}
