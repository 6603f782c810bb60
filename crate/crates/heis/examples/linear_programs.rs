use heis::simplex::{LinearProgram, LpOutcome, Relation};

fn main() {
    // Two-phase dense simplex over nonnegative variables. Maximize
    // 3x + 5y subject to x <= 4, 2y <= 12, 3x + 2y <= 18.
    let mut lp = LinearProgram::maximize(vec![3.0, 5.0]);
    lp.add_row(vec![1.0, 0.0], Relation::Le, 4.0);
    lp.add_row(vec![0.0, 2.0], Relation::Le, 12.0);
    lp.add_row(vec![3.0, 2.0], Relation::Le, 18.0);
    match lp.solve().unwrap() {
        LpOutcome::Optimal(sol) => {
            println!(
                "optimal {} at {:?} after {} pivots, duals {:?}",
                sol.objective, sol.x, sol.iterations, sol.duals
            );
        }
        other => panic!("unexpected outcome {other:?}"),
    }

    // Equality and >= rows go through phase one.
    let mut lp = LinearProgram::minimize(vec![2.0, 3.0, 0.0]);
    lp.add_row(vec![1.0, 1.0, 1.0], Relation::Eq, 10.0);
    lp.add_row(vec![1.0, 0.0, 0.0], Relation::Ge, 2.0);
    lp.add_row(vec![0.0, 1.0, 0.0], Relation::Ge, 3.0);
    match lp.solve().unwrap() {
        LpOutcome::Optimal(sol) => println!("phase-one case: optimal {} at {:?}", sol.objective, sol.x),
        other => panic!("unexpected outcome {other:?}"),
    }

    // Infeasible and unbounded programs are recognized, not mis-solved.
    let mut lp = LinearProgram::minimize(vec![1.0]);
    lp.add_row(vec![1.0], Relation::Le, -1.0);
    println!("x <= -1, x >= 0: {:?}", lp.solve().unwrap());

    let lp = LinearProgram::maximize(vec![1.0]);
    println!("maximize x, no rows: {:?}", lp.solve().unwrap());
}
