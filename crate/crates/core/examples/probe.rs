use workbench_core::adapted::{combine, CombineMode, GaugeIso};
use workbench_core::orient::tau::*;
use workbench_core::orient::*;
use workbench_core::orient::bordism::*;
use workbench_core::spectral::pf::*;
use workbench_core::ToleranceConfig;
use nalgebra::DMatrix;
type Mat = DMatrix<f64>;

fn block_diag(a: &Mat, b: &Mat) -> Mat {
    let mut m = Mat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

fn main() {
    let c = ToleranceConfig::default();
    let seed = 20260810u64 ^ (1u64 << 32) ^ 3; // DisjointUnion tag 3, ell 1
    let mut gen = ScenarioGen::new(seed);
    for trial in 0..40 {
        let da = gen.gen_range(1, 3);
        let a = gen.scenario(1, da);
        let db = gen.gen_range(1, 3);
        let mut b = gen.scenario(1, db);
        b.length = a.length;
        if trial != 36 { continue; }
        let union = GaugeCylinder {
            d0: combine(CombineMode::DisjointUnion, &a.d0, &b.d0, &c).unwrap(),
            gauge: GaugeIso {
                phi0: block_diag(&a.gauge.phi0, &b.gauge.phi0),
                phi1: block_diag(&a.gauge.phi1, &b.gauge.phi1),
            },
            length: a.length,
        };
        let rev = Some(block_diag(
            &skew_reversal(&a.d0.op.entries, &c).unwrap(),
            &skew_reversal(&b.d0.op.entries, &c).unwrap(),
        ));
        println!("dims {} {} length {:.3}", a.d0.dim_in(), b.d0.dim_in(), a.length);
        for (name, comb) in [
            ("a", CombinedBoundary::new(a.clone(), &c).unwrap()),
            ("b", CombinedBoundary::new(b.clone(), &c).unwrap()),
            ("u", CombinedBoundary::new_with_reversal(union.clone(), rev.clone(), &c).unwrap()),
        ] {
            let skew0 = SkewModel::new(comb.scenario.d0.op.entries.clone(), &c).unwrap();
            println!("  {name}: svals(D0) {:?}", skew0.inner.singular_values());
            match bordism_iso(&comb, &c) {
                Ok(m) => println!("     iso {m:?}"),
                Err(e) => {
                    println!("     iso ERR {e}");
                    // drill into tau with the canonical z
                    let delta = comb.admissible_cutoff(&c).unwrap();
                    let d1 = comb.scenario.d1(&c).unwrap();
                    let skew1 = SkewModel::new(d1.op.entries.clone(), &c).unwrap();
                    let x = pf_canonical(&skew0, skew0.inner.kernel_cutoff()).unwrap();
                    let y = pf_canonical(&skew1, skew1.inner.kernel_cutoff()).unwrap();
                    let z = combine_pf_points(&comb, &x, &y, delta, &c).unwrap();
                    let lag = debug_canonical_lagrangian(&comb, &skew_cmodel(&comb, &c), delta, &c).unwrap();
                    let ls = debug_lag_subspace(&comb, &skew_cmodel(&comb, &c), &lag).unwrap();
                    let r = comb.solve_with(&nearly(&comb, &ls, delta, &c), &c);
                    match r {
                        Ok(r) => println!("     solve: ker {} coker {} margin {:.2e}", r.ker_basis.dim(), r.coker_basis.dim(), r.condition),
                        Err(e) => println!("     solve ERR {e}"),
                    }
                    let lagf = lag.flipped();
                    let lsf = debug_lag_subspace(&comb, &skew_cmodel(&comb, &c), &lagf).unwrap();
                    {
                        use workbench_core::bvp::*;
                        use workbench_core::linalg::Subspace;
                        let b = nearly(&comb, &lsf, delta, &c);
                        let pulled = Subspace::from_spanning(
                            comb.t_map.ncols(),
                            &(comb.t_map.transpose() * &b.basis),
                            c.rank_tol,
                        );
                        let p = CylinderProblem {
                            cyl: comb.cyl_0.clone(),
                            length: comb.scenario.length,
                            condition: ProblemCondition::Joint { space: pulled.clone() },
                            monodromy: None,
                        };
                        // inspect the raw defect spectra of kernel and adjoint meets
                        let model = workbench_core::linalg::eig_selfadjoint(&p.cyl.a, &c).unwrap();
                        let graph = cauchy_graph(&model, p.length);
                        let d2 = graph.ambient_dim;
                        let id = Mat::identity(d2, d2);
                        let mut st = Mat::zeros(2 * d2, d2);
                        st.view_mut((0, 0), (d2, d2)).copy_from(&(&id - graph.projector()));
                        st.view_mut((d2, 0), (d2, d2)).copy_from(&(&id - pulled.projector()));
                        let mut sv: Vec<f64> = st.svd(false, false).singular_values.iter().copied().collect();
                        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
                        println!("     ker defect svals: {:?}", &sv[..6.min(sv.len())]);
                        let adj = adjoint_problem(&p, &c).unwrap();
                        let adj_model = workbench_core::linalg::eig_selfadjoint(&adj.cyl.a, &c).unwrap();
                        let adj_graph = cauchy_graph(&adj_model, p.length);
                        let adj_space = match &adj.condition { ProblemCondition::Joint { space } => space.clone(), _ => unreachable!() };
                        let mut st2 = Mat::zeros(2 * d2, d2);
                        st2.view_mut((0, 0), (d2, d2)).copy_from(&(&id - adj_graph.projector()));
                        st2.view_mut((d2, 0), (d2, d2)).copy_from(&(&id - adj_space.projector()));
                        let mut sv2: Vec<f64> = st2.svd(false, false).singular_values.iter().copied().collect();
                        sv2.sort_by(|a, b| a.partial_cmp(b).unwrap());
                        println!("     coker defect svals: {:?}", &sv2[..6.min(sv2.len())]);
                        // sigma transport identity
                        let w0n = comb.cyl_0.a.entries.nrows();
                        let mut s_joint = Mat::zeros(2 * w0n, 2 * w0n);
                        s_joint.view_mut((0, 0), (w0n, w0n)).copy_from(&comb.cyl_0.sigma.entries);
                        s_joint.view_mut((w0n, w0n), (w0n, w0n)).copy_from(&(-&comb.cyl_0.sigma.entries));
                        let lhs = &s_joint * comb.t_map.transpose();
                        let rhs = comb.t_map.transpose() * &comb.cyl_c.sigma.entries;
                        println!("     sigma-transport defect: {:.3e}", (lhs - rhs).amax());
                        let tt = &comb.t_map * comb.t_map.transpose();
                        println!("     t orthogonality defect: {:.3e}", (tt - Mat::identity(2*w0n, 2*w0n)).amax());
                        // is the pulled condition self-adjoint?
                        let adj_cond = joint_adjoint(&p.cyl, &pulled, &c);
                        println!("     B dim {} Badj dim {} angle {:.3e} projector-diff {:.3e}",
                            pulled.dim(), adj_cond.dim(),
                            if pulled.dim() == adj_cond.dim() { pulled.max_principal_angle(&adj_cond) } else { f64::NAN },
                            (pulled.projector() - adj_cond.projector()).amax());
                        {
                            // triangulate: manual sigma-perp vs joint_adjoint vs pulled
                            let sb = &s_joint * &pulled.basis;
                            let sb_space = workbench_core::linalg::Subspace::from_spanning(2 * w0n, &sb, c.rank_tol);
                            let manual_perp = workbench_core::linalg::subspace_perp(&sb_space);
                            println!("     manual (sigma B)^perp vs pulled: {:.3e}",
                                (manual_perp.projector() - pulled.projector()).amax());
                            println!("     manual vs joint_adjoint: {:.3e}",
                                (manual_perp.projector() - adj_cond.projector()).amax());
                            // and sigma B vs t^T sigma_c B_c
                            let bc2 = nearly(&comb, &lsf, delta, &c);
                            let alt = comb.t_map.transpose() * &comb.cyl_c.sigma.entries * &bc2.basis;
                            let alt_space = workbench_core::linalg::Subspace::from_spanning(2 * w0n, &alt, c.rank_tol);
                            println!("     sigma(pulled) vs t^T sigma_c B_c: {:.3e}",
                                (sb_space.projector() - alt_space.projector()).amax());
                        }
                        {
                            use workbench_core::bvp::joint_symbol;
                            let js = joint_symbol(&p.cyl);
                            println!("     joint_symbol vs probe s_joint: {:.3e}", (&js - &s_joint).amax());
                            let iso1 = (pulled.basis.transpose() * &js * &pulled.basis).amax();
                            let bc3 = nearly(&comb, &lsf, delta, &c);
                            let iso2 = (bc3.basis.transpose() * &comb.cyl_c.sigma.entries * &bc3.basis).amax();
                            println!("     joint isotropy {iso1:.3e}; Wc isotropy {iso2:.3e}");
                        }
                        // compare adjoint graph construction: adjoint flow vs condition
                        println!("     A' = -sAs^T symmetric? {:.2e}", {
                            let s0 = &comb.cyl_0.sigma.entries; let a0 = &comb.cyl_0.a.entries;
                            let ap = -(s0 * a0 * s0.transpose());
                            (&ap - &ap.transpose()).amax()
                        });
                        // and in W_c coordinates
                        let b_c = nearly(&comb, &lsf, delta, &c);
                        let sigma_c = &comb.cyl_c.sigma.entries;
                        let moved = b_c.map_through(sigma_c, c.rank_tol);
                        let perp = workbench_core::linalg::subspace_perp(&moved);
                        println!("     Wc: B dim {} sigmaBperp dim {} angle {:.3e}",
                            b_c.dim(), perp.dim(),
                            if b_c.dim() == perp.dim() { b_c.max_principal_angle(&perp) } else { f64::NAN });
                    }
                    let _ = z;
                }
            }
        }
    }
}

fn skew_cmodel(comb: &CombinedBoundary, c: &ToleranceConfig) -> SkewModel {
    comb.skew_model(c).unwrap()
}

fn nearly(comb: &CombinedBoundary, l: &workbench_core::linalg::Subspace, delta: f64, c: &ToleranceConfig) -> workbench_core::linalg::Subspace {
    use workbench_core::linalg::{eig_selfadjoint, subspace_sum};
    let am = eig_selfadjoint(&comb.cyl_c.a, c).unwrap();
    let core = am.spectral_interval(f64::NEG_INFINITY, -delta, c).unwrap();
    subspace_sum(&core, l, c)
}
