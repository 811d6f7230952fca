//! Grid-refinement study: evolve the ellipse under the area-preserving
//! flow to a fixed horizon on successively finer grids and compare the
//! terminal radial profiles against an n = 512 reference, per scheme.

use curveflow::flow::FlowLaw;
use curveflow::integrate::{evolve, Curve, FlowState, StepperConfig};
use curveflow::ops::Scheme;
use curveflow::scenario::{build_builtin, Backend, BuiltinCurveId};

fn terminal_profile(n: usize, scheme: Scheme) -> Vec<f64> {
    let curve = match build_builtin(
        &BuiltinCurveId::Ellipse { a: 2.0, b: 1.0 },
        Backend::Polar,
        n,
    )
    .unwrap()
    {
        Curve::Polar(c) => c,
        _ => unreachable!(),
    };
    let cfg = StepperConfig {
        t_end: 0.2,
        record_count: 10,
        tol_circle: 1e-300, // fixed horizon; no early convergence stop
        ..Default::default()
    };
    let out = evolve(FlowState::polar(curve), FlowLaw::Gapf, &cfg, scheme, |_, _| {});
    match out.final_state.curve {
        Curve::Polar(c) => c.r().to_vec(),
        _ => unreachable!(),
    }
}

fn main() {
    for scheme in [Scheme::Fd2, Scheme::Fd4, Scheme::Spectral] {
        let reference = terminal_profile(512, scheme);
        println!("{scheme:?}:");
        let mut prev: Option<f64> = None;
        for n in [64usize, 128, 256] {
            let coarse = terminal_profile(n, scheme);
            let stride = reference.len() / n;
            let err = coarse
                .iter()
                .enumerate()
                .map(|(j, v)| (v - reference[j * stride]).abs())
                .fold(0.0, f64::max);
            match prev {
                Some(p) => println!("  n = {n:3}: error = {err:.3e}  (ratio {:.1})", p / err),
                None => println!("  n = {n:3}: error = {err:.3e}"),
            }
            prev = Some(err);
        }
    }
}
