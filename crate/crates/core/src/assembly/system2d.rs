use std::sync::Arc;

use crate::cheb_time::TimeOperator;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, SchemeParams};
use crate::problems::ProblemSpec;
use crate::simplex::Triangle;
use crate::taylor2d::{complete_batch, source_transforms_2d, Advection, TransformTable2D, UnknownLayout2D};

use super::{check_inputs, unit_seed, AssemblyOptions, Assembler, ElementMap, GlobalSystem, Shape};

/// Assembles the planar system. `frozen` carries one velocity table per
/// element (lexicographic order) and must be present exactly when the
/// problem is nonlinear.
pub fn build_system_2d(
    mesh: &Mesh,
    scheme: &SchemeParams,
    time: &TimeOperator,
    problem: &ProblemSpec,
    frozen: Option<&[TransformTable2D]>,
    options: &AssemblyOptions,
) -> Result<GlobalSystem> {
    check_inputs(mesh, scheme, problem, 2)?;
    let order = scheme.order;
    let modes = time.modes();
    let elements = mesh.element_count();
    match (problem.nonlinear, frozen) {
        (true, None) => return Err(Error::invalid("a nonlinear problem needs frozen velocity tables")),
        (false, Some(_)) => return Err(Error::invalid("frozen velocity given for a linear problem")),
        (_, Some(f)) if f.len() != elements || f.iter().any(|t| t.modes() != modes) => {
            return Err(Error::invalid("one frozen velocity table per element is required"));
        }
        _ => {}
    }

    let tri = Triangle::new(order);
    let per_mode = UnknownLayout2D::new(order).per_mode();
    let c = &problem.coefficients;
    let diffusion = [c.diffusion[0], c.diffusion[1]];
    let advection = |e: usize| match frozen {
        Some(f) => Advection::Frozen {
            velocity: &f[e],
            direction: [1.0, 1.0],
        },
        None => Advection::Constant([c.velocity[0], c.velocity[1]]),
    };

    let basis_for = |e: usize| -> Result<Vec<f64>> {
        let mut data = unit_seed(tri.len(), modes, per_mode);
        complete_batch(&tri, modes, modes * per_mode, &mut data, None, diffusion, advection(e), time.reduced())?;
        Ok(data)
    };
    let shared = if frozen.is_none() && !options.no_basis_reuse {
        Some(Arc::new(basis_for(0)?))
    } else {
        None
    };

    let mut maps = Vec::with_capacity(elements);
    for e in 0..elements {
        let idx = mesh.element_index(e);
        let element = mesh.element_2d(idx[0], idx[1]);
        let basis = match &shared {
            Some(b) => Arc::clone(b),
            None => Arc::new(basis_for(e)?),
        };
        let sources = source_transforms_2d(problem, &element, time.initial_column(), order)?;
        let mut particular = vec![0.0; tri.len() * modes];
        complete_batch(
            &tri,
            modes,
            1,
            &mut particular,
            Some(sources.as_slice()),
            diffusion,
            advection(e),
            time.reduced(),
        )?;
        maps.push(ElementMap { basis, particular });
    }

    let mut asm = Assembler::new(mesh, scheme, time, problem, Shape::Tri(tri), per_mode, maps, options)?;
    asm.interfaces()?;
    asm.boundaries();
    Ok(asm.finish())
}
