use lodis::discriminate::{optimize, CostKind, DiscriminationProblem, OptimizeConfig};
use lodis::schur_weyl::SchurWeylTransform;
use lodis::states::rho_completely;

fn main() {
    let t3 = SchurWeylTransform::build(3, 3).unwrap();
    let problem = DiscriminationProblem::standard(rho_completely(3)).unwrap();
    let mut config = OptimizeConfig::new(3, 100, 17);
    config.cost = CostKind::ForcedCoincidence { eta: 10.0 };
    config.xi_ladder = vec![6.0];
    let res = optimize(&problem, &config, &t3).unwrap();
    println!("success {:.12}", res.success);
    println!("reck: {:?}", res.reck);
    for row in &res.outcomes {
        println!(
            "  {}  p {:.12}  residual {:.3e}  in D: {}",
            row.occupation.display(),
            row.probability,
            row.residual,
            row.discriminating
        );
    }
    println!("|U|^2:");
    let u = res.interferometer.matrix();
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| format!("{:.6}", u[(i, j)].norm_sqr())).collect();
        println!("  {}", row.join("  "));
    }
}
