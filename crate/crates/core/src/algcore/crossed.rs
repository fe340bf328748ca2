use serde_json::{json, Value};

use crate::exactfield::{ensure_same, Field, FqT, RatFn};

use super::{AlgError, KummerExtension, StructureAlgebra};

/// A normalized 2-cocycle of the cyclic group `Z/n` with values in `K`,
/// indexed by exponents: `table[a][b] = f(σ^a, σ^b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    order: usize,
    table: Vec<Vec<RatFn<u64>>>,
}

impl Cocycle {
    /// Validates normalization and `σ^a(f(b,c)) f(a,b+c) = f(a,b) f(a+b,c)`.
    pub fn new(kx: &KummerExtension, table: Vec<Vec<RatFn<u64>>>) -> Result<Self, AlgError> {
        let n = kx.degree();
        let k = kx.ext_field();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(AlgError::CocycleInvalid(format!("table must be {n}x{n}")));
        }
        for (a, row) in table.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                if v.is_zero() || !k.contains(v) {
                    return Err(AlgError::CocycleInvalid(format!("f({a},{b}) must be a nonzero element of K")));
                }
            }
        }
        for j in 0..n {
            if !k.is_one(&table[0][j]) || !k.is_one(&table[j][0]) {
                return Err(AlgError::CocycleInvalid(format!("not normalized at index {j}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = k.mul(&kx.sigma(a, &table[b][c]), &table[a][(b + c) % n]);
                    let rhs = k.mul(&table[a][b], &table[(a + b) % n][c]);
                    if lhs != rhs {
                        return Err(AlgError::CocycleInvalid(format!("cocycle identity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(Cocycle { order: n, table })
    }

    pub fn trivial(kx: &KummerExtension) -> Self {
        let n = kx.degree();
        Cocycle { order: n, table: vec![vec![kx.ext_field().one(); n]; n] }
    }

    /// The cocycle of the symbol algebra: `f(σ^a, σ^b) = b` when `a + b >= n`.
    pub fn symbol(kx: &KummerExtension, b: &RatFn<u64>) -> Result<Self, AlgError> {
        let n = kx.degree();
        let k = kx.ext_field();
        let table = (0..n)
            .map(|i| (0..n).map(|j| if i + j >= n { b.clone() } else { k.one() }).collect())
            .collect();
        Cocycle::new(kx, table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self, a: usize, b: usize) -> &RatFn<u64> {
        &self.table[a % self.order][b % self.order]
    }

    /// Whether every value is a constant of `F_q`.
    pub fn is_constant(&self, k: &FqT) -> bool {
        self.table.iter().flatten().all(|v| k.as_constant(v).is_some())
    }

    pub fn to_json(&self, k: &FqT) -> Value {
        json!({
            "order": self.order,
            "table": self.table.iter().map(|r| r.iter().map(|v| k.elem_to_json(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn power_label(var: &str, i: usize) -> String {
    match i {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{i}"),
    }
}

fn monomial_label(x: &str, i: usize, y: &str, j: usize) -> String {
    let l = format!("{}{}", power_label(x, i), power_label(y, j));
    if l.is_empty() {
        "1".into()
    } else {
        l
    }
}

/// The symbol algebra on `x^i y^j` (index `i + n j`), `x^n = a`, `y^n = b`,
/// `y x = ζ x y`.
pub fn make_symbol_algebra<F: Field>(
    field: F,
    a: &F::Elem,
    b: &F::Elem,
    n: usize,
    zeta: &F::Elem,
) -> Result<StructureAlgebra<F>, AlgError> {
    if n == 0 {
        return Err(AlgError::BadDegree("n must be positive".into()));
    }
    if field.is_zero(a) || field.is_zero(b) {
        return Err(AlgError::Degenerate("a and b must be nonzero".into()));
    }
    let primitive = field.is_one(&field.pow(zeta, n as u64)) && (1..n).all(|j| !field.is_one(&field.pow(zeta, j as u64)));
    if !primitive {
        return Err(AlgError::BadRoot(format!("{} is not a primitive {n}-th root of unity", field.render(zeta))));
    }
    let d = n * n;
    let mut constants = vec![vec![vec![field.zero(); d]; d]; d];
    for j in 0..n {
        for i in 0..n {
            for l in 0..n {
                for k in 0..n {
                    let mut c = field.pow(zeta, (j * k) as u64);
                    if i + k >= n {
                        c = field.mul(&c, a);
                    }
                    if j + l >= n {
                        c = field.mul(&c, b);
                    }
                    constants[i + n * j][k + n * l][(i + k) % n + n * ((j + l) % n)] = c;
                }
            }
        }
    }
    let mut unit = vec![field.zero(); d];
    unit[0] = field.one();
    let labels = (0..d).map(|m| monomial_label("x", m % n, "y", m / n)).collect();
    StructureAlgebra::new(field, labels, constants, unit)
}

/// The crossed product `(K|F, Z/e, f)` as an `F`-algebra on `s^a u^b`
/// (index `a + e b`), with `u s = ζ s u` and `u^a u^b = f(a,b) u^{a+b}`.
pub fn make_crossed_product(kx: &KummerExtension, f: &Cocycle) -> Result<StructureAlgebra<FqT>, AlgError> {
    let e = kx.degree();
    if f.order() != e {
        return Err(AlgError::CocycleInvalid(format!("cocycle order {} differs from [K:F] = {e}", f.order())));
    }
    let k = kx.ext_field();
    let ff = kx.base_field();
    let fq = kx.fq();
    let d = e * e;
    let mut constants = vec![vec![vec![ff.zero(); d]; d]; d];
    for b in 0..e {
        for a in 0..e {
            for dd in 0..e {
                for c in 0..e {
                    // s^a u^b s^c u^d = ζ^{bc} s^{a+c} f(b,d) u^{b+d}
                    let coeff = k.mul(&k.monomial(fq.pow(&kx.zeta(), (b * c) as u64), (a + c) as i64), f.value(b, dd));
                    let col = (b + dd) % e;
                    for (r, x) in kx.decompose(&coeff).into_iter().enumerate() {
                        constants[a + e * b][c + e * dd][r + e * col] = x;
                    }
                }
            }
        }
    }
    let mut unit = vec![ff.zero(); d];
    unit[0] = ff.one();
    let labels = (0..d).map(|m| monomial_label("s", m % e, "u", m / e)).collect();
    StructureAlgebra::new(ff.clone(), labels, constants, unit)
}

/// `A ⊗_F K`: the same structure constants read in `K` through `t -> s^e`.
pub fn base_change(a: &StructureAlgebra<FqT>, kx: &KummerExtension) -> Result<StructureAlgebra<FqT>, AlgError> {
    ensure_same(a.field(), kx.base_field()).map_err(|e| AlgError::FieldMismatch(e.to_string()))?;
    a.map_field(kx.ext_field().clone(), |c| kx.embed(c))
}
