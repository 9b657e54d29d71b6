use nplan::encoders::{assemble_bound, EncodingKind};
use nplan::generate::two_robots_problem;
use nplan::model::ActionId;
use std::time::Instant;

fn main() {
    let p = two_robots_problem(1, 1).unwrap();
    let plan_order: Vec<ActionId> = ["lre", "rle", "rgt_l", "lft_r", "conn", "exch", "disc", "lft_l", "rgt_r"]
        .iter().map(|n| p.action_by_name(n).unwrap()).collect();
    let reverse: Vec<ActionId> = plan_order.iter().rev().copied().collect();
    for n in 1..=5 {
        let enc = assemble_bound(&p, &EncodingKind::R2e { order: reverse.clone() }, n).unwrap();
        std::fs::write(format!("/tmp/q_r2e_{n}.smt2"), enc.to_smtlib()).unwrap();
        let t = Instant::now();
        let out = std::process::Command::new("z3").arg(format!("/tmp/q_r2e_{n}.smt2")).output().unwrap();
        println!("r2e-rev n={n}: {:?} -> {}", t.elapsed(),
            String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or(""));
    }
}
