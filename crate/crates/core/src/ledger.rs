//! Exact bookkeeping of the exponent inequalities behind the dyadic summations.
//!
//! Every check is evaluated in `BigRational` arithmetic, so boundary points such as
//! `sigma = 3/(2r)` are classified without rounding.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Result};
use crate::rational::{format_rational, int, rat, Rational};

/// `(r, sigma, b, eps)` with `p = r/(r-1)` and `s = sigma + 1` derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerParams {
    pub r: Rational,
    pub sigma: Rational,
    pub b: Rational,
    pub eps: Rational,
}

impl LedgerParams {
    pub fn new(r: Rational, sigma: Rational, b: Rational, eps: Rational) -> Result<Self> {
        check_r(&r)?;
        Ok(Self { r, sigma, b, eps })
    }

    pub fn p(&self) -> Rational {
        &self.r / (&self.r - Rational::one())
    }

    pub fn s(&self) -> Rational {
        &self.sigma + Rational::one()
    }
}

fn check_r(r: &Rational) -> Result<()> {
    if *r <= Rational::one() || *r > int(2) {
        Err(invalid("r", format!("{} is outside (1, 2]", format_rational(r))))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    Global,
    /// High-low-high interaction with `L2 <= N1`.
    HlhSmallL2,
    /// High-low-high interaction with `L2 > N1`.
    HlhLargeL2,
    /// Low-high-high interaction with `L2 <= N0^{2r/p} / N1^{2r/p - 1}`.
    LhhSmallL2,
    /// Low-high-high interaction above that threshold.
    LhhLargeL2,
}

impl CaseId {
    pub const ALL: [CaseId; 5] = [
        Self::Global,
        Self::HlhSmallL2,
        Self::HlhLargeL2,
        Self::LhhSmallL2,
        Self::LhhLargeL2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Global => "global",
            Self::HlhSmallL2 => "hlh_small_l2",
            Self::HlhLargeL2 => "hlh_large_l2",
            Self::LhhSmallL2 => "lhh_small_l2",
            Self::LhhLargeL2 => "lhh_large_l2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Gt,
    Ge,
    Lt,
}

impl Relation {
    fn eval(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Self::Gt => lhs > rhs,
            Self::Ge => lhs >= rhs,
            Self::Lt => lhs < rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Gt => ">",
            Self::Ge => ">=",
            Self::Lt => "<",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityCheck {
    pub case_id: CaseId,
    pub name: &'static str,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
    pub holds: bool,
}

impl fmt::Display for InequalityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} {} {} ({})",
            self.case_id.name(),
            self.name,
            format_rational(&self.lhs),
            self.relation.symbol(),
            format_rational(&self.rhs),
            if self.holds { "holds" } else { "fails" }
        )
    }
}

struct Checks {
    case_id: CaseId,
    out: Vec<InequalityCheck>,
}

impl Checks {
    fn push(&mut self, name: &'static str, lhs: Rational, relation: Relation, rhs: Rational) {
        let holds = relation.eval(&lhs, &rhs);
        self.out.push(InequalityCheck {
            case_id: self.case_id,
            name,
            lhs,
            relation,
            rhs,
            holds,
        });
    }

    /// Geometric-sum condition for `sum_{M <= N} M^A N^B`-type double sums with the
    /// logarithmic `A = B = 0` case excluded.
    fn two_exponent_sum(&mut self, a: Rational, b: Rational) {
        self.push("lemma42 B >= A", b.clone(), Relation::Ge, a.clone());
        self.push("lemma42 B >= 0", b.clone(), Relation::Ge, Rational::zero());
        self.push("lemma42 not(A = B = 0)", a.abs() + b.abs(), Relation::Gt, Rational::zero());
    }
}

/// Evaluates the inequalities of one interaction case.
pub fn check_case(params: &LedgerParams, case: CaseId) -> Result<Vec<InequalityCheck>> {
    check_r(&params.r)?;
    let one = Rational::one();
    let zero = Rational::zero();
    let r = &params.r;
    let sigma = &params.sigma;
    let b = &params.b;
    let ir = &one / r;
    let ip = &one / params.p();
    let mut c = Checks {
        case_id: case,
        out: vec![],
    };
    match case {
        CaseId::Global => {
            c.push("r > 3/2", r.clone(), Relation::Gt, rat(3, 2));
            c.push("b > 1/r", b.clone(), Relation::Gt, ir.clone());
            c.push("b < 1", b.clone(), Relation::Lt, one.clone());
            c.push("eps > 0", params.eps.clone(), Relation::Gt, zero.clone());
            c.push("eps < 1 - b", params.eps.clone(), Relation::Lt, &one - b);
            c.push("b + eps - 1 < 0", b + &params.eps - &one, Relation::Lt, zero.clone());
        }
        CaseId::HlhSmallL2 => {
            c.push("1/r - b < 0", &ir - b, Relation::Lt, zero.clone());
            c.push("1/(2r) - b < 0", &ir / int(2) - b, Relation::Lt, zero.clone());
            c.two_exponent_sum(rat(3, 2) * &ir - sigma, zero.clone());
        }
        CaseId::HlhLargeL2 => {
            c.push("1/r - b < 0", &ir - b, Relation::Lt, zero.clone());
            c.two_exponent_sum(int(2) * &ir - b - sigma, zero.clone());
        }
        CaseId::LhhSmallL2 => {
            let a = &ip + sigma;
            let bb = int(2) * sigma - rat(3, 2) * &ir + &ip;
            c.push("1/r - b < 0", &ir - b, Relation::Lt, zero.clone());
            c.push("lemma43 B > 0", bb.clone(), Relation::Gt, zero.clone());
            c.push("lemma43 B > A", bb.clone(), Relation::Gt, a.clone());
            c.push("2 sigma > 3/(2r) - 1/p", int(2) * sigma, Relation::Gt, rat(3, 2) * &ir - &ip);
            c.push(
                "2 sigma - 3/(2r) + 1/p > sigma + 1/p",
                bb,
                Relation::Gt,
                a,
            );
        }
        CaseId::LhhLargeL2 => {
            let two_r_over_p = int(2) * r * &ip;
            c.push(
                "positivity 2 sigma - 2/r + 2/p - (2r/p - 1) b > 0",
                int(2) * sigma - int(2) * &ir + int(2) * &ip - (two_r_over_p - &one) * b,
                Relation::Gt,
                zero.clone(),
            );
            c.push("gap sigma - 2/r + b > 0", sigma - int(2) * &ir + b, Relation::Gt, zero.clone());
            c.push("1/r - b < 0", &ir - b, Relation::Lt, zero.clone());
        }
    }
    Ok(c.out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub feasible: bool,
    pub failing: Vec<InequalityCheck>,
    /// `(b, eps)` of a feasible parameter set.
    pub witness: Option<(Rational, Rational)>,
}

/// Conjunction of every case at the given `(b, eps)`.
pub fn check_all(params: &LedgerParams) -> Result<Verdict> {
    let mut failing = vec![];
    for case in CaseId::ALL {
        failing.extend(check_case(params, case)?.into_iter().filter(|c| !c.holds));
    }
    let feasible = failing.is_empty();
    Ok(Verdict {
        feasible,
        failing,
        witness: feasible.then(|| (params.b.clone(), params.eps.clone())),
    })
}

/// The open interval `(lo, hi)` of admissible `b`; `eps` may then be any value in `(0, 1 - b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleB {
    pub lo: Rational,
    pub hi: Rational,
    /// `lo < hi` and every `b`-independent condition holds.
    pub nonempty: bool,
}

impl FeasibleB {
    pub fn contains(&self, b: &Rational) -> bool {
        self.nonempty && *b > self.lo && *b < self.hi
    }

    /// Upper bound on `eps` at a given `b`.
    pub fn eps_max(b: &Rational) -> Rational {
        Rational::one() - b
    }

    /// Midpoint `b` and `eps = (1 - b)/2`.
    pub fn witness(&self) -> Option<(Rational, Rational)> {
        self.nonempty.then(|| {
            let b = (&self.lo + &self.hi) / int(2);
            let eps = Self::eps_max(&b) / int(2);
            (b, eps)
        })
    }
}

/// Intersects the half-lines in `b` imposed by all cases at fixed `(r, sigma)`.
///
/// Lower bounds: `b > 1/r` and the gap `b > 2/r - sigma` (which also excludes the
/// logarithmic case of the large-`L2` sum). Upper bounds: `b < 1` and positivity
/// `(2r - 3) b < 2 sigma - 4/r + 2`. The `b`-free conditions are `r > 3/2`,
/// `sigma > 3/(2r)` and `2 sigma > 3/(2r) - 1/p`.
pub fn feasible_b(r: &Rational, sigma: &Rational) -> Result<FeasibleB> {
    check_r(r)?;
    let one = Rational::one();
    let ir = &one / r;
    let ip = &one - &ir;
    let lo = std::cmp::max(ir.clone(), int(2) * &ir - sigma);
    let slope = int(2) * r - int(3);
    let pos = int(2) * sigma - int(4) * &ir + int(2);
    let mut hi = one.clone();
    let mut b_free = *r > rat(3, 2)
        && *sigma > rat(3, 2) * &ir
        && int(2) * sigma > rat(3, 2) * &ir - &ip;
    if slope.is_positive() {
        hi = std::cmp::min(hi, &pos / &slope);
    } else if !pos.is_positive() {
        b_free = false;
    }
    let nonempty = b_free && lo < hi;
    Ok(FeasibleB { lo, hi, nonempty })
}
