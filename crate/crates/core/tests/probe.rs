#[test]
fn probe_schematic() {
    use selfsim_core::*;
    let k0 = std::f64::consts::PI / 8.0;
    let band = move |x: f64| {
        0.05 * ((2.0 * k0 * x).sin() + 0.5 * (5.0 * k0 * x + 0.3).cos() + 0.25 * (9.0 * k0 * x).sin())
    };
    for n in [128usize, 256] {
        let grid = Grid::new(1, n, 8.0).unwrap();
        let f = Field::from_fn(grid, |[x, _]| band(x) * (-(x / 6.0f64).powi(8)).exp());
        let jet = f.jets(4).unwrap();
        let nl = flow::duhamel_nonlinearity_from_jet(&jet, FlowSpec::wf()).unwrap();
        let mut best = (0usize, 0.0f64);
        let mut majmax = 0.0f64;
        let mut majs = vec![0.0; grid.len()];
        for i in 0..grid.len() {
            let d1 = jet.grad_norm(i);
            let d2 = jet.hess_norm(i);
            let t3 = &jet.third.as_ref().unwrap()[i];
            let t4 = &jet.fourth.as_ref().unwrap()[i];
            let d3 = (t3[0]*t3[0] + 3.0*t3[1]*t3[1] + 3.0*t3[2]*t3[2] + t3[3]*t3[3]).sqrt();
            let d4 = (t4[0]*t4[0] + 4.0*t4[1]*t4[1] + 6.0*t4[2]*t4[2] + 4.0*t4[3]*t4[3] + t4[4]*t4[4]).sqrt();
            majs[i] = d2*d2*d2 + d1*d3*d2 + d1*d1*d4 + d2;
            majmax = majmax.max(majs[i]);
        }
        for i in 0..grid.len() {
            if majs[i] > 1e-8 * majmax {
                let r = nl.residual()[i].abs() / majs[i];
                if r > best.1 { best = (i, r); }
            }
        }
        let x = grid.coords(best.0)[0];
        println!("n={n}: C={:.3e} at x={x:.3}, majorant there {:.3e}, N there {:.3e}, majmax {:.3e}", best.1, majs[best.0], nl.residual()[best.0].abs(), majmax);
    }
}
