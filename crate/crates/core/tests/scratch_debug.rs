use num_complex::Complex64;
use scalarlab::field::ScalarField;
use scalarlab::grid::Grid;
use scalarlab::mollifier::Mollifier;
use scalarlab::multiplier::{apply_multiplier, MultiplierSymbol};
use scalarlab::renorm::RenormPower;
use scalarlab::synth;

#[test]
fn debug_split_routes() {
    let g = Grid::new(2, 64).unwrap();
    let theta = synth::lacunary(g, 0.6, 3, 5).unwrap();
    let u = apply_multiplier(&MultiplierSymbol::builtin("sqg").unwrap(), &theta).unwrap();
    let eps = 0.1;
    let moll = Mollifier::build(g, eps).unwrap();
    let power = RenormPower::new(Complex64::new(2.2, 0.0));
    let n = g.points() as f64;

    let theta_eps = moll.apply(&theta).unwrap();
    let u_eps = moll.apply_vector(&u).unwrap();
    let w: Vec<Complex64> = theta_eps.values().iter().map(|&v| power.weight(v)).collect();

    // route 1: direct
    let mut divc = ScalarField::zeros(g);
    let mut c_fields = Vec::new();
    for axis in 0..2 {
        let uc = u.component(axis);
        let uce = &u_eps.components()[axis];
        let c_axis = theta_eps.mul_pointwise(uce).unwrap()
            .sub(&moll.apply(&theta.mul_pointwise(uc).unwrap()).unwrap()).unwrap();
        divc = divc.add(&c_axis.derivative(axis).unwrap()).unwrap();
        c_fields.push(c_axis);
    }
    let mut r_direct = Complex64::new(0.0, 0.0);
    for j in 0..g.points() { r_direct += divc.values()[j] * w[j]; }
    r_direct /= n;

    // route 2: IBP with spectral grad of w
    let w_re = ScalarField::from_values(g, w.iter().map(|c| c.re).collect()).unwrap();
    let w_im = ScalarField::from_values(g, w.iter().map(|c| c.im).collect()).unwrap();
    let mut r_ibp = Complex64::new(0.0, 0.0);
    for axis in 0..2 {
        let dre = w_re.derivative(axis).unwrap();
        let dim = w_im.derivative(axis).unwrap();
        for j in 0..g.points() {
            let gw = Complex64::new(dre.values()[j], dim.values()[j]);
            r_ibp -= c_fields[axis].values()[j] * gw;
        }
    }
    r_ibp /= n;

    // route 3: P - Q pointwise identity check
    let mut worst = 0.0f64;
    for axis in 0..2 {
        let uc = u.component(axis);
        let uce = &u_eps.components()[axis];
        let p = theta_eps.sub(&theta).unwrap().mul_pointwise(&uce.sub(uc).unwrap()).unwrap();
        let a = moll.apply(&theta.mul_pointwise(uc).unwrap()).unwrap();
        let b = theta.mul_pointwise(uce).unwrap();
        let cc = uc.mul_pointwise(&theta_eps).unwrap();
        let d = theta.mul_pointwise(uc).unwrap();
        let q = a.sub(&b).unwrap().sub(&cc).unwrap().add(&d).unwrap();
        let diff = p.sub(&q).unwrap().sub(&c_fields[axis]).unwrap().max_abs();
        worst = worst.max(diff);
    }
    println!("r_direct = {r_direct}");
    println!("r_ibp    = {r_ibp}");
    println!("|P-Q-C|  = {worst}");
    println!("rel gap direct vs ibp = {}", (r_direct - r_ibp).norm() / r_direct.norm());
}

#[test]
fn debug_complex_gradient() {
    // compare the commutator path's residual_parts against the manual route
    use scalarlab::commutator::residual_parts;
    use scalarlab::renorm::TestFunction;
    use scalarlab::spacetime::SpaceTimeField;

    let g = Grid::new(2, 64).unwrap();
    let theta = synth::lacunary(g, 0.6, 3, 5).unwrap();
    let u = apply_multiplier(&MultiplierSymbol::builtin("sqg").unwrap(), &theta).unwrap();
    let stf = SpaceTimeField::frozen(theta.clone(), Some(u.clone()), 1.0, 16).unwrap();
    let phi = TestFunction::bump(1.0, 0.2).unwrap();
    let z = Complex64::new(2.2, 0.0);
    let (r, split) = residual_parts(&stf, 0.1, z, &phi).unwrap();
    println!("module r      = {r}");
    println!("module sum    = {}", split.sum());
    println!("module i1..j2 = {} {} {} {}", split.i1, split.i2, split.j1, split.j2);

    // time factor
    let dt = stf.dt();
    let tw: f64 = stf.times().iter().map(|&t| phi.psi(t)).sum::<f64>() * dt;
    println!("time weight = {tw}");

    // manual spatial r (same as debug_split_routes) times tw
    let eps = 0.1;
    let moll = Mollifier::build(g, eps).unwrap();
    let power = RenormPower::new(z);
    let n = g.points() as f64;
    let theta_eps = moll.apply(&theta).unwrap();
    let u_eps = moll.apply_vector(&u).unwrap();
    let w: Vec<Complex64> = theta_eps.values().iter().map(|&v| power.weight(v)).collect();
    let mut divc = ScalarField::zeros(g);
    for axis in 0..2 {
        let uc = u.component(axis);
        let uce = &u_eps.components()[axis];
        let c_axis = theta_eps.mul_pointwise(uce).unwrap()
            .sub(&moll.apply(&theta.mul_pointwise(uc).unwrap()).unwrap()).unwrap();
        divc = divc.add(&c_axis.derivative(axis).unwrap()).unwrap();
    }
    let mut r_direct = Complex64::new(0.0, 0.0);
    for j in 0..g.points() { r_direct += divc.values()[j] * w[j]; }
    r_direct /= n;
    println!("manual r*tw = {}", r_direct * tw);
}

#[test]
fn debug_z2_cancellation() {
    use scalarlab::commutator::residual_parts;
    use scalarlab::renorm::TestFunction;
    use scalarlab::spacetime::SpaceTimeField;

    let g = Grid::new(2, 64).unwrap();
    let theta = synth::lacunary(g, 0.6, 4, 5).unwrap();
    let u = apply_multiplier(&MultiplierSymbol::builtin("sqg").unwrap(), &theta).unwrap();
    let stf = SpaceTimeField::frozen(theta.clone(), Some(u.clone()), 1.0, 32).unwrap();
    let phi = TestFunction::bump(1.0, 0.2).unwrap();
    for z in [Complex64::new(2.0, 0.0), Complex64::new(2.2, 0.4), Complex64::new(2.2, 0.0)] {
        let (r, split) = residual_parts(&stf, 0.1, z, &phi).unwrap();
        let sum = split.sum();
        let terms = split.i1.norm() + split.i2.norm() + split.j1.norm() + split.j2.norm();
        println!(
            "z={z}: |r|={:.3e} |sum-r|={:.3e} termscale={:.3e} rel_to_r={:.3e}",
            r.norm(), (sum - r).norm(), terms, (sum - r).norm() / r.norm()
        );
    }
}
