//! Golden-section search for a local maximum.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]` by golden-section search until the bracket is
/// narrower than `tol`. Returns `(argmax, max)`; the best evaluated point is
/// reported, so the endpoints compete with the interior, and a final
/// parabolic step sharpens the argmax of smooth peaks.
pub fn golden_refine<F: Fn(f64) -> f64>(f: F, bracket: (f64, f64), tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let (lo0, hi0) = (a, b);
    let tol = tol.max(f64::EPSILON * a.abs().max(b.abs()).max(1.0));
    let mut best = {
        let (fa, fb) = (f(a), f(b));
        if fa >= fb {
            (a, fa)
        } else {
            (b, fb)
        }
    };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a) > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm > best.1 {
        best = (mid, fm);
    }
    parabolic_polish(&f, best, (lo0, hi0))
}

/// One parabolic step through `x - h, x, x + h`. Function values cannot
/// locate a smooth maximum better than `sqrt(eps)`; the vertex of a wide
/// stencil can. The step is kept only if it does not lose value.
fn parabolic_polish<F: Fn(f64) -> f64>(f: &F, best: (f64, f64), bracket: (f64, f64)) -> (f64, f64) {
    let (x, fx) = best;
    let h = 1e-4 * (bracket.1 - bracket.0);
    if h <= 0.0 || x - h < bracket.0 || x + h > bracket.1 {
        return best;
    }
    let (fl, fr) = (f(x - h), f(x + h));
    let curvature = fl - 2.0 * fx + fr;
    if !(curvature < 0.0) {
        return best;
    }
    let step = 0.5 * h * (fl - fr) / curvature;
    if !(step.abs() <= h) {
        return best;
    }
    let xv = x + step;
    let fv = f(xv);
    if fv >= fx {
        (xv, fv)
    } else {
        best
    }
}
