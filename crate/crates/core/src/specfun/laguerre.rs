/// Laguerre polynomial `L_k(x)` by the three-term recurrence
/// `(j+1) L_{j+1} = (2j+1-x) L_j - j L_{j-1}`.
pub fn laguerre(degree: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if degree == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for j in 1..degree {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - x) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln L_k(-x)` for `x ≥ 0`.
///
/// Every coefficient of `L_k(-x)` is nonnegative, so the value is positive;
/// the recurrence is rescaled as it runs so large degrees and arguments do
/// not overflow.
pub fn ln_laguerre_negative(degree: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    let mut ln_scale = 0.0;
    let mut prev = 1.0f64;
    if degree == 0 {
        return 0.0;
    }
    let mut cur = 1.0 + x;
    for j in 1..degree {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + x) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur > 1e200 {
            ln_scale += cur.ln();
            prev /= cur;
            cur = 1.0;
        }
    }
    ln_scale + cur.ln()
}

/// `ln L_k(-x)` for every degree `k = 0..=max_degree`, from one pass of the
/// recurrence.
pub fn ln_laguerre_negative_all(max_degree: u32, x: f64) -> Vec<f64> {
    debug_assert!(x >= 0.0);
    let mut out = Vec::with_capacity(max_degree as usize + 1);
    out.push(0.0);
    if max_degree == 0 {
        return out;
    }
    let mut ln_scale = 0.0;
    let mut prev = 1.0f64;
    let mut cur = 1.0 + x;
    out.push(cur.ln());
    for j in 1..max_degree {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + x) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur > 1e200 {
            ln_scale += cur.ln();
            prev /= cur;
            cur = 1.0;
        }
        out.push(ln_scale + cur.ln());
    }
    out
}
