use serde_json::{json, Value};

use crate::algcore::{element_probe, ElementProbe, ProbeClass, StructureAlgebra};
use crate::exactfield::{Field, Fq, FqT, RatFn};

use super::DeltaError;

/// `R = F[y]/(y^{p^i} - f)` with `f = x^{p^i}`, and the nilpotent `z = y - x`.
#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentWitness {
    pub algebra: StructureAlgebra<FqT>,
    pub z: Vec<RatFn<u64>>,
    pub probe: ElementProbe<RatFn<u64>>,
    pub order: usize,
}

impl NilpotentWitness {
    pub fn to_json(&self) -> Value {
        json!({
            "relation": format!("y^{} = {}", self.order, self.algebra.field().render(&self.algebra.product_of_basis(self.order - 1, 1)[0])),
            "dim": self.algebra.dim(),
            "z": self.algebra.render_elem(&self.z),
            "probe": self.probe.to_json(&self.algebra),
        })
    }
}

/// Builds `F_p(t)[y]/(y^{p^i} - f)`, checks `x^{p^i} = f` and certifies that
/// `z = y - x` is a nonzero nilpotent of index at most `p^i`.
pub fn nilpotent_witness(p: u64, i: u32, f: &RatFn<u64>, x: &RatFn<u64>) -> Result<NilpotentWitness, DeltaError> {
    let field = FqT::new(Fq::prime(p)?, 't');
    if !field.contains(f) || !field.contains(x) {
        return Err(DeltaError::RelationFails("f and x must be elements of F_p(t)".into()));
    }
    if f.is_zero() {
        return Err(DeltaError::RelationFails("degenerate relation y^(p^i) = 0".into()));
    }
    let order = p
        .checked_pow(i)
        .filter(|&q| q <= 1 << 12)
        .ok_or_else(|| DeltaError::RelationFails(format!("p^i = {p}^{i} is too large")))? as usize;
    if field.pow(x, order as u64) != *f {
        return Err(DeltaError::RelationFails(format!(
            "({})^{order} ≠ {}",
            field.render(x),
            field.render(f)
        )));
    }
    let mut constants = vec![vec![vec![field.zero(); order]; order]; order];
    for (a, row) in constants.iter_mut().enumerate() {
        for (b, c) in row.iter_mut().enumerate() {
            if a + b < order {
                c[a + b] = field.one();
            } else {
                c[a + b - order] = f.clone();
            }
        }
    }
    let labels = (0..order)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "y".to_string(),
            _ => format!("y^{k}"),
        })
        .collect();
    let mut unit = vec![field.zero(); order];
    unit[0] = field.one();
    let algebra = StructureAlgebra::new(field.clone(), labels, constants, unit)?;
    let mut z = algebra.basis(1.min(order - 1));
    z[0] = field.sub(&z[0], x);
    if algebra.is_zero(&z) {
        return Err(DeltaError::RelationFails("z = y - x vanishes".into()));
    }
    let probe = element_probe(&algebra, &z, order);
    if probe.classification != ProbeClass::Nilpotent || !probe.verify(&algebra, &z) {
        return Err(DeltaError::RelationFails("y - x is not nilpotent".into()));
    }
    Ok(NilpotentWitness { algebra, z, probe, order })
}
