//! Simplicial cones and exact membership tests.

use num_traits::{Signed, Zero};

use super::linalg::solve_linear_system;
use super::{AlgebraError, LatticeVector, Rational};

/// A simplicial cone spanned by linearly independent generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialCone {
    generators: Vec<LatticeVector>,
}

/// Location of a point relative to a simplicial cone, with the coefficients
/// of its unique expansion in the generators as witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeMembership {
    /// All expansion coefficients are positive.
    Interior { coefficients: Vec<Rational> },
    /// In the cone with at least one zero coefficient; `face` lists the
    /// indices of the generators spanning the minimal face containing the
    /// point.
    Boundary {
        coefficients: Vec<Rational>,
        face: Vec<usize>,
    },
    /// Outside the cone, or outside its linear span.
    Outside,
}

impl SimplicialCone {
    pub fn new(generators: Vec<LatticeVector>) -> Result<Self, AlgebraError> {
        if generators.is_empty() {
            return Err(AlgebraError::ZeroVector);
        }
        let dim = generators[0].dim();
        for g in &generators {
            if g.dim() != dim {
                return Err(AlgebraError::DimensionMismatch(g.dim(), dim));
            }
        }
        if generators.len() > dim {
            return Err(AlgebraError::DependentGenerators);
        }
        // Independence is equivalent to the homogeneous system having only
        // the zero solution, which for a consistent square-or-tall system
        // shows up as full pivot count; test by solving against each
        // generator and checking the expansion is the expected unit vector.
        let cols: Vec<Vec<Rational>> = generators.iter().map(|g| g.coords().to_vec()).collect();
        for (i, g) in generators.iter().enumerate() {
            let sol = solve_linear_system(&cols, g.coords())?
                .expect("each generator lies in the span");
            for (j, c) in sol.iter().enumerate() {
                let expected = if i == j {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                };
                if *c != expected {
                    return Err(AlgebraError::DependentGenerators);
                }
            }
        }
        Ok(SimplicialCone { generators })
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &LatticeVector {
        &self.generators[i]
    }

    /// Locates `v` relative to the cone. The coefficient witness is the
    /// unique expansion of `v` in the generators when `v` lies in the span.
    pub fn membership(&self, v: &LatticeVector) -> Result<ConeMembership, AlgebraError> {
        if v.dim() != self.ambient_dim() {
            return Err(AlgebraError::DimensionMismatch(v.dim(), self.ambient_dim()));
        }
        let cols: Vec<Vec<Rational>> = self.generators.iter().map(|g| g.coords().to_vec()).collect();
        let Some(coefficients) = solve_linear_system(&cols, v.coords())? else {
            return Ok(ConeMembership::Outside);
        };
        // The expansion must reproduce v exactly; a least-squares-like
        // spurious solution cannot occur because solve reports consistency.
        if coefficients.iter().any(|c| c.is_negative()) {
            return Ok(ConeMembership::Outside);
        }
        let face: Vec<usize> = coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect();
        if face.len() == self.generators.len() {
            Ok(ConeMembership::Interior { coefficients })
        } else {
            Ok(ConeMembership::Boundary { coefficients, face })
        }
    }

    /// Replaces generator `index` by `v`, keeping the others.
    pub fn with_generator(&self, index: usize, v: LatticeVector) -> Result<Self, AlgebraError> {
        let mut generators = self.generators.clone();
        generators[index] = v;
        SimplicialCone::new(generators)
    }
}
