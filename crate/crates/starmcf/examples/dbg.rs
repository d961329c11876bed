use starmcf::backlund::*;
use starmcf::frames::*;
use starmcf::hierarchy::{potential_matrix, quaternion_a, Sigma};
use starmcf::mat2::{quaternion_basis, CMat2};
use starmcf::potential::PotentialGrid;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 { C64::new(re, im) }

fn main() {
    let nx = 256;
    let nt = 200;
    let length = 8.0 * PI;
    let dx = length / nx as f64;
    let dt = 0.05 / (nt - 1) as f64;
    let q = PotentialGrid::from_fn(nx, nt, dx, dt, Sigma::Plus, |_, _| c(0.0, 0.0)).unwrap();
    let alpha = c(0.0, 1.0);
    let (_, a, _, _) = quaternion_basis();
    let f_alpha = FrameGrid::from_fn(alpha, Sigma::Plus, nx, nt, dx, dt, |x, t| {
        a.scale(alpha * (x - length / 2.0) + (alpha * alpha - C64::new(0.25, 0.0)) * t).exp()
    });
    // fixed-point direction first
    for v in [[c(1.0,0.0), c(0.0,0.0)], [c(1.0,0.0), c(1.0,0.0)]] {
        let params = BtParams::new(alpha, v).unwrap();
        let lambda_out = c(1.0, 0.0);
        let (ft, q_new) = bt_gp_frame(&q, &f_alpha, &params, WConvention::QuarterSigma, lambda_out, &TransportConfig::default()).unwrap();
        let j = nt / 2;
        let mut worst = 0.0f64;
        let mut worst_i = 0;
        for i in 1..nx - 1 {
            let dfx = (ft.value(i + 1, j) - ft.value(i - 1, j)).scale(c(0.5 / dx, 0.0));
            let lhs = ft.value(i, j).inverse().unwrap() * dfx;
            let want = quaternion_a().scale(lambda_out) + potential_matrix(q_new.value(i, j));
            let d = (lhs - want).max_abs();
            if d > worst { worst = d; worst_i = i; }
        }
        println!("v = {:?}: worst {:.3e} at i = {}", v, worst, worst_i);
        // print entries at worst point
        let i = worst_i;
        let dfx = (ft.value(i + 1, j) - ft.value(i - 1, j)).scale(c(0.5 / dx, 0.0));
        let lhs = ft.value(i, j).inverse().unwrap() * dfx;
        let want = quaternion_a().scale(lambda_out) + potential_matrix(q_new.value(i, j));
        println!("  lhs  = {:?}", lhs.m);
        println!("  want = {:?}", want.m);
    }
}
