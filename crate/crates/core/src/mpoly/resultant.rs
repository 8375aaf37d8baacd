use super::{Poly, Ring};
use crate::error::{Error, Result};
use crate::exactnum::Field;

/// Sylvester matrix of `f` and `g` with respect to variable `var`; entries
/// are polynomials free of `var`.
pub fn sylvester_matrix<F: Field>(
    f: &Poly<F>,
    g: &Poly<F>,
    var: usize,
) -> Result<Vec<Vec<Poly<F>>>> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::invalid("resultant of the zero polynomial"));
    }
    if !std::sync::Arc::ptr_eq(f.ring(), g.ring()) && **f.ring() != **g.ring() {
        return Err(Error::invalid("resultant across rings"));
    }
    if var >= f.ring().arity() {
        return Err(Error::invalid("resultant variable out of range"));
    }
    let fc = f.coefficients_in(var);
    let gc = g.coefficients_in(var);
    let (n, m) = (fc.len() - 1, gc.len() - 1);
    if n == 0 && m == 0 {
        return Err(Error::invalid(
            "resultant of two polynomials constant in the variable",
        ));
    }
    let size = n + m;
    let zero = Poly::zero(f.ring());
    let mut rows = Vec::with_capacity(size);
    // m shifted copies of f, then n shifted copies of g, highest degree first
    for (shifts, coeffs, deg) in [(m, &fc, n), (n, &gc, m)] {
        for s in 0..shifts {
            let mut row = vec![zero.clone(); size];
            for k in 0..=deg {
                row[s + k] = coeffs[deg - k].clone();
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// `Res_var(f, g)` by fraction-free Bareiss elimination of the Sylvester
/// matrix; every division is exact.
pub fn resultant<F: Field>(f: &Poly<F>, g: &Poly<F>, var: usize) -> Result<Poly<F>> {
    let mut a = sylvester_matrix(f, g, var)?;
    let ring: &std::sync::Arc<Ring<F>> = f.ring();
    let size = a.len();
    let mut prev = Poly::one(ring);
    let mut negate = false;
    for k in 0..size {
        if a[k][k].is_zero() {
            match (k + 1..size).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(Poly::zero(ring)),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev)?.expect("Bareiss step divides exactly");
            }
            a[i][k] = Poly::zero(ring);
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    Ok(if negate { -&det } else { det })
}
