//! Prints the first disk-harmonic eigenvalues and checks orthonormality of a
//! few basis functions with a polar midpoint rule.
//!
//!     cargo run --release --example basis_table

use disk_harmonics::basis::{eval_basis, BoundaryCondition, EigenTable};
use std::f64::consts::PI;

fn main() -> disk_harmonics::Result<()> {
    for bc in [BoundaryCondition::Neumann, BoundaryCondition::Dirichlet] {
        let table = EigenTable::new(4, bc)?;
        println!("{bc} eigenvalues l(m)_k");
        for m in 0..=4 {
            let row: Vec<String> = (m..=4)
                .map(|k| format!("{:8.4}", table.eigenvalue(m, k)))
                .collect();
            println!("  m={m}: {}", row.join(" "));
        }
    }

    let table = EigenTable::new(3, BoundaryCondition::Neumann)?;
    let modes = [(0, 0), (1, 0), (1, 1), (2, -1), (3, 2)];
    let (nr, np) = (400, 64);
    let mut gram = [[0.0; 5]; 5];
    for i in 0..nr {
        let rho = (i as f64 + 0.5) / nr as f64;
        for j in 0..np {
            let phi = 2.0 * PI * j as f64 / np as f64;
            let w = rho * 2.0 * PI / (nr * np) as f64;
            let vals: Vec<_> = modes
                .iter()
                .map(|&(k, m)| eval_basis(&table, k, m, rho, phi))
                .collect::<Result<_, _>>()?;
            for a in 0..5 {
                for b in 0..5 {
                    gram[a][b] += (vals[a] * vals[b].conj()).re * w;
                }
            }
        }
    }
    println!("gram matrix of {modes:?}");
    for row in gram {
        println!("  {}", row.map(|g| format!("{g:7.4}")).join(" "));
    }
    Ok(())
}
