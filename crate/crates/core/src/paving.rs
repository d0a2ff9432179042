//! The irreducible convex paving on the atoms of the first marginal, its
//! boundary augmentations, and polar-pair classification.
//!
//! Each atom `x` gets `I(x) = ri conv supp P_x` for the maximal-support
//! coupling `P`. Atoms with the same closure form a component. Points off
//! the support of the first marginal are implicit singleton components.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{self, Coupling};
use crate::error::{Error, Result};
use crate::geometry::{self, ContainmentMode, Point, Polytope, RelOpenConvexSet};
use crate::lp::{self, FeasibleRegion, LpOutcome, Sense};
use crate::measures::MotInstance;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// `cl I` for every member.
    pub closure: Polytope,
    /// Member atoms of the first marginal.
    pub mu_atoms: Vec<usize>,
    /// Atoms of the second marginal lying in `cl I`.
    pub nu_atoms: Vec<usize>,
}

impl Component {
    pub fn interior(&self) -> RelOpenConvexSet {
        RelOpenConvexSet::relative_interior_of(self.closure.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMap {
    instance: MotInstance,
    atom_component: Vec<usize>,
    components: Vec<Component>,
}

impl ComponentMap {
    pub fn instance(&self) -> &MotInstance {
        &self.instance
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Component index of atom `i` of the first marginal.
    pub fn component_of(&self, i: usize) -> usize {
        self.atom_component[i]
    }

    /// `I(x_i)`.
    pub fn interior_of(&self, i: usize) -> RelOpenConvexSet {
        self.components[self.atom_component[i]].interior()
    }

    pub fn closure_of(&self, i: usize) -> &Polytope {
        &self.components[self.atom_component[i]].closure
    }
}

/// Computes the maximal-support coupling and the paving it generates.
pub fn irreducible_paving(instance: &MotInstance) -> Result<ComponentMap> {
    let phat = coupling::maximal_support_coupling(instance)?;
    paving_from_coupling(instance, &phat)
}

/// The paving generated by `phat`, which must be a maximal-support coupling
/// of `instance` for the result to be the irreducible one.
pub fn paving_from_coupling(instance: &MotInstance, phat: &Coupling) -> Result<ComponentMap> {
    phat.validate(instance)?;
    let mut components: Vec<Component> = Vec::new();
    let mut atom_component = Vec::with_capacity(instance.mu.len());
    for i in 0..instance.mu.len() {
        let hull = coupling::row_hull(instance, phat, i);
        if !hull.contains_by_facets(instance.mu.point(i), ContainmentMode::RelativeInterior) {
            return Err(Error::Internal(format!("atom {} is outside ri conv supp of its kernel", instance.mu.point(i))));
        }
        match components.iter().position(|c| c.closure == hull) {
            Some(k) => {
                components[k].mu_atoms.push(i);
                atom_component.push(k);
            }
            None => {
                let nu_atoms = (0..instance.nu.len())
                    .filter(|&j| hull.contains_by_facets(instance.nu.point(j), ContainmentMode::Closure))
                    .collect();
                atom_component.push(components.len());
                components.push(Component { closure: hull, mu_atoms: vec![i], nu_atoms });
            }
        }
    }
    for (a, ca) in components.iter().enumerate() {
        for cb in &components[a + 1..] {
            if geometry::relative_interiors_meet(&ca.closure, &cb.closure) {
                return Err(Error::Internal(format!("components {} and {} overlap", ca.closure, cb.closure)));
            }
        }
    }
    Ok(ComponentMap { instance: instance.clone(), atom_component, components })
}

/// Boundary augmentations of one component: `J_lower = I + lower_atoms`,
/// `J_upper = I + upper_boundary`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentJ {
    pub interior: RelOpenConvexSet,
    /// Atoms of the second marginal on the relative boundary of `I` that the
    /// maximal-support coupling charges from the component.
    pub lower_atoms: Vec<usize>,
    /// `cl conv` of the boundary part of the conditional support, if any.
    pub upper_boundary: Option<Polytope>,
}

impl ComponentJ {
    pub fn lower_contains(&self, instance: &MotInstance, y: &Point) -> bool {
        self.interior.contains(y) || self.lower_atoms.iter().any(|&j| instance.nu.point(j) == y)
    }

    pub fn upper_contains(&self, y: &Point) -> bool {
        self.interior.contains(y)
            || self.upper_boundary.as_ref().is_some_and(|b| b.contains_by_facets(y, ContainmentMode::Closure))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JMaps {
    pub per_component: Vec<ComponentJ>,
}

/// Reads `J_lower` and `J_upper` off the maximal-support coupling.
/// Constancy across the members of a component is checked, not assumed.
pub fn j_maps(cm: &ComponentMap, phat: &Coupling) -> Result<JMaps> {
    let instance = cm.instance();
    if phat.shape() != instance.shape() {
        return Err(Error::InstanceMismatch("coupling shape differs from the paving's instance".into()));
    }
    let mut per_component = Vec::with_capacity(cm.components.len());
    for comp in &cm.components {
        let mut boundary: Option<Vec<usize>> = None;
        for &i in &comp.mu_atoms {
            if coupling::row_hull(instance, phat, i) != comp.closure {
                return Err(Error::InstanceMismatch(format!("coupling does not generate the component of atom {i}")));
            }
            let here: Vec<usize> = phat
                .row_support(i)
                .into_iter()
                .filter(|&j| comp.closure.contains_by_facets(instance.nu.point(j), ContainmentMode::RelativeBoundary))
                .collect();
            match &boundary {
                None => boundary = Some(here),
                Some(b) if *b == here => {}
                Some(_) => {
                    return Err(Error::Internal(format!("boundary charge differs across component {}", comp.closure)))
                }
            }
        }
        let lower_atoms = boundary.unwrap_or_default();
        let upper_boundary = if lower_atoms.is_empty() {
            None
        } else {
            let pts: Vec<Point> = lower_atoms.iter().map(|&j| instance.nu.point(j).clone()).collect();
            Some(Polytope::from_points(&pts)?)
        };
        per_component.push(ComponentJ { interior: comp.interior(), lower_atoms, upper_boundary });
    }
    Ok(JMaps { per_component })
}

impl JMaps {
    /// Checks `I <= J_lower <= J_upper <= cl I` per component.
    pub fn check_chain(&self, cm: &ComponentMap) -> Result<()> {
        let instance = cm.instance();
        for (comp, j) in cm.components.iter().zip(&self.per_component) {
            for &a in &j.lower_atoms {
                let y = instance.nu.point(a);
                if !j.upper_contains(y) || !comp.closure.contains_by_facets(y, ContainmentMode::Closure) {
                    return Err(Error::Internal(format!("J chain broken at {y}")));
                }
            }
            if let Some(b) = &j.upper_boundary {
                if !b.is_subset_of(&comp.closure) {
                    return Err(Error::Internal(format!("upper boundary {b} leaves {}", comp.closure)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Nonpolar,
    Polar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairClass {
    pub polarity: Polarity,
    /// `max p[x][y]` over all martingale couplings.
    pub max_mass: Rational,
    /// An optimal coupling charging the pair when nonpolar.
    pub witness: Option<Coupling>,
    pub in_lower_j: bool,
    pub in_upper_j: bool,
}

impl PairClass {
    /// Nonpolar exactly when `y` lies in `J_lower(x)`.
    pub fn consistent(&self) -> bool {
        (self.polarity == Polarity::Nonpolar) == self.in_lower_j
    }
}

/// Classifies pairs of atoms by one exact LP each, reusing a single
/// feasible basis, and reports `J` membership alongside.
pub struct PairClassifier {
    instance: MotInstance,
    region: FeasibleRegion,
    nvars: usize,
    paving: ComponentMap,
    jmaps: JMaps,
}

impl PairClassifier {
    pub fn new(instance: &MotInstance) -> Result<Self> {
        let prog = lp::build_mot_lp(instance);
        let region = FeasibleRegion::new(&prog).map_err(|_| Error::NotInConvexOrder)?;
        let phat = coupling::maximal_support_coupling(instance)?;
        let paving = paving_from_coupling(instance, &phat)?;
        let jmaps = j_maps(&paving, &phat)?;
        Ok(Self { instance: instance.clone(), region, nvars: prog.num_vars(), paving, jmaps })
    }

    pub fn paving(&self) -> &ComponentMap {
        &self.paving
    }

    pub fn jmaps(&self) -> &JMaps {
        &self.jmaps
    }

    pub fn classify(&self, i: usize, j: usize) -> Result<PairClass> {
        let (n, m) = self.instance.shape();
        if i >= n {
            return Err(Error::NotInSupport("first"));
        }
        if j >= m {
            return Err(Error::NotInSupport("second"));
        }
        let mut objective = vec![Rational::zero(); self.nvars];
        objective[i * m + j] = Rational::from_integer(1.into());
        let LpOutcome::Optimal { value, primal, .. } = self.region.optimize(&objective, Sense::Maximize) else {
            return Err(Error::Internal("pair LP over a nonempty polytope must be optimal".into()));
        };
        let (polarity, witness) = if value.is_positive() {
            (Polarity::Nonpolar, Some(Coupling::from_flat(&self.instance, &primal)))
        } else {
            (Polarity::Polar, None)
        };
        let jc = &self.jmaps.per_component[self.paving.component_of(i)];
        let y = self.instance.nu.point(j);
        Ok(PairClass {
            polarity,
            max_mass: value,
            witness,
            in_lower_j: jc.lower_contains(&self.instance, y),
            in_upper_j: jc.upper_contains(y),
        })
    }

    /// All pairs, row-major; computed in parallel and merged in index order.
    pub fn classify_all(&self) -> Result<Vec<Vec<PairClass>>> {
        let (n, m) = self.instance.shape();
        (0..n).into_par_iter().map(|i| (0..m).map(|j| self.classify(i, j)).collect()).collect()
    }
}

/// Whether `(x, y)` is charged by some martingale coupling.
pub fn classify_pair(x: &Point, y: &Point, instance: &MotInstance) -> Result<PairClass> {
    let i = instance.mu.index_of(x).ok_or(Error::NotInSupport("first"))?;
    let j = instance.nu.index_of(y).ok_or(Error::NotInSupport("second"))?;
    PairClassifier::new(instance)?.classify(i, j)
}
