use std::sync::Arc;

use crate::cheb_time::TimeOperator;
use crate::error::Result;
use crate::mesh::{Mesh, SchemeParams};
use crate::problems::ProblemSpec;
use crate::simplex::Tetra;
use crate::taylor3d::{complete_batch, source_transforms_3d, UnknownLayout3D};

use super::{check_inputs, unit_seed, AssemblyOptions, Assembler, ElementMap, GlobalSystem, Shape};

/// Assembles the three-dimensional system for a linear problem.
pub fn build_system_3d(
    mesh: &Mesh,
    scheme: &SchemeParams,
    time: &TimeOperator,
    problem: &ProblemSpec,
    options: &AssemblyOptions,
) -> Result<GlobalSystem> {
    check_inputs(mesh, scheme, problem, 3)?;
    let order = scheme.order;
    let modes = time.modes();
    let elements = mesh.element_count();
    let tet = Tetra::new(order);
    let per_mode = UnknownLayout3D::new(order).per_mode();
    let pde = &problem.coefficients;

    let basis_for = || -> Result<Vec<f64>> {
        let mut data = unit_seed(tet.len(), modes, per_mode);
        complete_batch(&tet, modes, modes * per_mode, &mut data, None, pde, time.reduced())?;
        Ok(data)
    };
    let shared = if options.no_basis_reuse {
        None
    } else {
        Some(Arc::new(basis_for()?))
    };

    let mut maps = Vec::with_capacity(elements);
    for e in 0..elements {
        let idx = mesh.element_index(e);
        let element = mesh.element_3d(idx[0], idx[1], idx[2]);
        let basis = match &shared {
            Some(b) => Arc::clone(b),
            None => Arc::new(basis_for()?),
        };
        let sources = source_transforms_3d(problem, &element, time.initial_column(), order)?;
        let mut particular = vec![0.0; tet.len() * modes];
        complete_batch(&tet, modes, 1, &mut particular, Some(sources.as_slice()), pde, time.reduced())?;
        maps.push(ElementMap { basis, particular });
    }

    let mut asm = Assembler::new(mesh, scheme, time, problem, Shape::Tet(tet), per_mode, maps, options)?;
    asm.interfaces()?;
    asm.boundaries();
    Ok(asm.finish())
}
