//! The special-form dichotomy and the auxiliary polynomials `M_P` and `H_F`.

use serde::Serialize;

use super::poly::{Poly2, Poly4, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    SpecialForm,
    Expander,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reason {
    PxIdenticallyZero,
    PyIdenticallyZero,
    PxyIdenticallyZeroAndMPZero,
    MPIdenticallyZero,
    MPNonzero,
}

/// Outcome of [`classify_special_form`]. `witness` holds the nonzero `M_P`
/// exactly when the verdict is [`Verdict::Expander`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    verdict: Verdict,
    reason: Reason,
    witness: Option<Poly2>,
}

impl Classification {
    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn reason(&self) -> Reason {
        self.reason
    }

    pub fn witness(&self) -> Option<&Poly2> {
        self.witness.as_ref()
    }

    pub fn is_special_form(&self) -> bool {
        self.verdict == Verdict::SpecialForm
    }
}

/// `M_P = P_y^2 (P_x P_xxy - P_xx P_xy) - P_x^2 (P_y P_xyy - P_xy P_yy)`.
///
/// Wherever `P_x P_y != 0` this equals `(P_x P_y)^2 d_xy log(P_x / P_y)`, and
/// wherever `P_xy != 0` it equals `P_xy^2 K_P`.
pub fn mp_numerator(p: &Poly2) -> Poly2 {
    use Var::{X, Y};
    let px = p.partial(X, 1);
    let py = p.partial(Y, 1);
    let pxx = px.partial(X, 1);
    let pxy = px.partial(Y, 1);
    let pyy = py.partial(Y, 1);
    let pxxy = pxx.partial(Y, 1);
    let pxyy = pxy.partial(Y, 1);
    let left = &py.pow(2) * &(&(&px * &pxxy) - &(&pxx * &pxy));
    let right = &px.pow(2) * &(&(&py * &pxyy) - &(&pxy * &pyy));
    left - right
}

/// Decides exactly whether `P` is a special form `h(a(x) + b(y))`.
///
/// Constants and the zero polynomial report [`Reason::PxIdenticallyZero`].
pub fn classify_special_form(p: &Poly2) -> Classification {
    let special = |reason| Classification {
        verdict: Verdict::SpecialForm,
        reason,
        witness: None,
    };
    let px = p.partial(Var::X, 1);
    if px.is_zero() {
        return special(Reason::PxIdenticallyZero);
    }
    if p.partial(Var::Y, 1).is_zero() {
        return special(Reason::PyIdenticallyZero);
    }
    let mp = mp_numerator(p);
    if mp.is_zero() {
        if px.partial(Var::Y, 1).is_zero() {
            special(Reason::PxyIdenticallyZeroAndMPZero)
        } else {
            special(Reason::MPIdenticallyZero)
        }
    } else {
        Classification {
            verdict: Verdict::Expander,
            reason: Reason::MPNonzero,
            witness: Some(mp),
        }
    }
}

// slots in (x, x', y, y')
const UNPRIMED: [usize; 2] = [0, 2];
const PRIMED: [usize; 2] = [1, 3];

/// `F(x, x', y, y') = P(x, y) - P(x', y')`.
pub fn difference_form(p: &Poly2) -> Poly4 {
    p.embed::<4>(UNPRIMED) - p.embed::<4>(PRIMED)
}

/// `H_F` for `F = P(x, y) - P(x', y')`:
/// `P_x P_y (x, y) * P_xy (x', y') - P_x P_y (x', y') * P_xy (x, y)`.
pub fn hf_poly(p: &Poly2) -> Poly4 {
    use Var::{X, Y};
    let px = p.partial(X, 1);
    let py = p.partial(Y, 1);
    let pxy = px.partial(Y, 1);
    let g = &px * &py;
    let left = &g.embed::<4>(UNPRIMED) * &pxy.embed::<4>(PRIMED);
    let right = &g.embed::<4>(PRIMED) * &pxy.embed::<4>(UNPRIMED);
    left - right
}

/// The four-term bracket
/// `F_x F_y' F_x'y - F_x F_y F_x'y' - F_x' F_y' F_xy + F_x' F_y F_xy'`.
pub fn hf_general(f: &Poly4) -> Poly4 {
    use Var::{Xp, Yp, X, Y};
    let fx = f.partial(X, 1);
    let fy = f.partial(Y, 1);
    let fxp = f.partial(Xp, 1);
    let fyp = f.partial(Yp, 1);
    let t1 = &(&fx * &fyp) * &fxp.partial(Y, 1);
    let t2 = &(&fx * &fy) * &fxp.partial(Yp, 1);
    let t3 = &(&fxp * &fyp) * &fx.partial(Y, 1);
    let t4 = &(&fxp * &fy) * &fx.partial(Yp, 1);
    ((t1 - t2) - t3) + t4
}
