//! A point-cloud layer: steerable convolution, self-interaction, then the sphere
//! nonlinearity. Reads an XYZ file if one is given, else uses a small molecule.

use std::collections::BTreeMap;

use homharm::groups::Rotation3;
use homharm::nonlin::{ActivationKind, ActivationSpec, PointNonlinOptions};
use homharm::se_kernels::{se3_layer, PointCloud, RadialProfile, SE3KernelBasis, Se3LayerSpec, SelfInteraction, TfnConv, TfnTerm};
use nalgebra::{DMatrix, Vector3};

const METHANE: &str = "5
methane
C  0.0000  0.0000  0.0000
H  0.6291  0.6291  0.6291
H -0.6291 -0.6291  0.6291
H -0.6291  0.6291 -0.6291
H  0.6291 -0.6291 -0.6291
";

fn main() -> homharm::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => METHANE.to_string(),
    };
    let mut cloud = PointCloud::from_xyz(&text)?;
    // One scalar channel per point to start from.
    for f in &mut cloud.features {
        f.insert(0, DMatrix::from_element(1, 1, 1.0));
        f.insert(1, DMatrix::zeros(3, 1));
    }

    let radial = RadialProfile::from_fn(20, 2.0, |r| (-(r - 1.0) * (r - 1.0) * 4.0).exp());
    let mut terms = Vec::new();
    for (li, lo) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for basis in SE3KernelBasis::all_for(li, lo, |_| radial.clone())? {
            terms.push(TfnTerm { basis, weights: DMatrix::from_element(1, 1, 0.5) });
        }
    }
    let spec = Se3LayerSpec {
        conv: TfnConv { terms, radius: 1.5 },
        self_interaction: Some(SelfInteraction { weights: BTreeMap::from([(0, DMatrix::from_element(1, 1, 0.2))]) }),
        activation: ActivationSpec::new(ActivationKind::Gelu),
        out_orders: vec![0, 1],
        nonlin: PointNonlinOptions::default(),
    };
    let out = se3_layer(&cloud, &spec)?;
    for (p, f) in out.positions.iter().zip(&out.features) {
        println!("{:>7.3} {:>7.3} {:>7.3}  l0 {:>8.4}  |l1| {:.4}", p.x, p.y, p.z, f[&0][(0, 0)], f[&1].norm());
    }

    let r = Rotation3::from_euler(0.3, 1.1, -0.4);
    let t = Vector3::new(1.0, -2.0, 0.5);
    let a = se3_layer(&cloud.rototranslate(&r, &t), &spec)?;
    let b = out.rototranslate(&r, &t);
    let err = a.features.iter().zip(&b.features).map(|(x, y)| (&x[&1] - &y[&1]).norm() + (&x[&0] - &y[&0]).norm()).fold(0.0, f64::max);
    println!("equivariance error under a rigid motion: {err:.2e}");
    println!("{}", out.to_json()?.lines().take(6).collect::<Vec<_>>().join("\n"));
    Ok(())
}
