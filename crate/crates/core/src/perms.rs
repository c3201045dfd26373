//! Pairwise-independent affine permutations x ↦ a·x + b over GF(q).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QcextError, Result};
use crate::fields::{gf_add, gf_mul, FieldElement, FieldSpec, FieldTables};
use crate::linalg::{ComplexMatrix, ONE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePermutation {
    a: FieldElement,
    b: FieldElement,
    images: Vec<usize>,
}

impl AffinePermutation {
    pub fn new(a: FieldElement, b: FieldElement) -> Result<Self> {
        if a.is_zero() {
            return Err(QcextError::InvalidParameter(
                "affine permutation needs a nonzero slope".into(),
            ));
        }
        let spec = a.spec().clone();
        let images = crate::fields::enumerate(&spec)
            .iter()
            .map(|x| Ok(gf_add(&gf_mul(&a, x)?, &b)?.index()))
            .collect::<Result<Vec<_>>>()?;
        Ok(AffinePermutation { a, b, images })
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.a.spec()
    }

    /// Image of the element with canonical index `x`.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// self ∘ other: x ↦ a(a'x + b') + b.
    pub fn compose(&self, other: &AffinePermutation) -> Result<AffinePermutation> {
        let a = gf_mul(&self.a, &other.a)?;
        let b = gf_add(&gf_mul(&self.a, &other.b)?, &self.b)?;
        AffinePermutation::new(a, b)
    }

    pub fn record(&self) -> PermutationRecord {
        PermutationRecord {
            a: self.a.coeffs().to_vec(),
            b: self.b.coeffs().to_vec(),
        }
    }
}

/// Serialized form: slope and offset as coefficient vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationRecord {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

/// All q(q-1) affine maps, slope index major and offset index minor.
pub fn build_affine_family(q: usize) -> Result<Vec<AffinePermutation>> {
    let spec = Arc::new(FieldSpec::for_order(q)?);
    let tables = FieldTables::new(spec.clone());
    let mut out = Vec::with_capacity(q * (q - 1));
    for a in 1..q {
        for b in 0..q {
            let images = (0..q).map(|x| tables.add(tables.mul(a, x), b)).collect();
            out.push(AffinePermutation {
                a: spec.element(a),
                b: spec.element(b),
                images,
            });
        }
    }
    Ok(out)
}

/// Exact pairwise-independence check.
///
/// Counts, for every x1 ≠ x2 and y1 ≠ y2, the members with π(x1)=y1 and
/// π(x2)=y2, and returns max |count/L - 1/(q(q-1))|. The comparison is done
/// on integers; the result is exactly 0 for a pairwise-independent family.
pub fn verify_pairwise_independence(family: &[AffinePermutation], q: usize) -> f64 {
    let (num, den) = pairwise_deviation_exact(family.iter().map(|p| p.images()), q);
    if num == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Worst deviation as an exact fraction (numerator, denominator).
pub fn pairwise_deviation_exact<'a>(
    family: impl Iterator<Item = &'a [usize]>,
    q: usize,
) -> (u64, u64) {
    let mut counts = vec![0u64; q.pow(4)];
    let mut l = 0u64;
    for images in family {
        l += 1;
        for x1 in 0..q {
            for x2 in 0..q {
                if x1 != x2 {
                    counts[((x1 * q + x2) * q + images[x1]) * q + images[x2]] += 1;
                }
            }
        }
    }
    let pairs = (q * (q - 1)) as u64;
    if l == 0 {
        return (1, pairs);
    }
    let mut worst = 0u64;
    for x1 in 0..q {
        for x2 in 0..q {
            for y1 in 0..q {
                for y2 in 0..q {
                    if x1 == x2 || y1 == y2 {
                        continue;
                    }
                    let cnt = counts[((x1 * q + x2) * q + y1) * q + y2];
                    worst = worst.max((cnt * pairs).abs_diff(l));
                }
            }
        }
    }
    (worst, l * pairs)
}

/// 0/1 matrix sending |x> to |π(x)>.
pub fn permutation_unitary(perm: &AffinePermutation) -> ComplexMatrix {
    permutation_matrix(perm.images())
}

pub fn permutation_matrix(images: &[usize]) -> ComplexMatrix {
    let q = images.len();
    let mut m = ComplexMatrix::zeros(q, q);
    for (x, &y) in images.iter().enumerate() {
        m[(y, x)] = ONE;
    }
    m
}
