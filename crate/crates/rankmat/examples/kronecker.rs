//! Kronecker products of matrices over a semigroup and their order.
//!
//! cargo run --example kronecker

use std::sync::Arc;

use rankmat::kronecker::{
    equivalent, finite_order, kronecker_power, kronecker_product, multiplication_matrix, two_by_two_claim,
    SemigroupMatrix,
};
use rankmat::semigroup::FiniteSemigroup;

fn main() -> rankmat::Result<()> {
    let z2 = Arc::new(FiniteSemigroup::cyclic_group(2));
    let a = SemigroupMatrix::over(z2.clone(), vec![vec![0, 1], vec![1, 0]])?;
    let b = SemigroupMatrix::over(z2.clone(), vec![vec![0, 0, 1], vec![0, 1, 1]])?;
    let p = kronecker_product(&a, &b)?;
    println!(
        "A (x) B over Z2: {}x{}, distinct rows {} <= {} * {}",
        p.row_count(),
        p.col_count(),
        p.distinct_rows(),
        a.distinct_rows(),
        b.distinct_rows()
    );
    println!("A (x) B equivalent to B (x) A: {}", equivalent(&p, &kronecker_product(&b, &a)?));

    for n in 1..=4 {
        let q = kronecker_power(&a, n)?;
        println!("A^{n}: {}x{}, distinct rows {}", q.row_count(), q.col_count(), q.distinct_rows());
    }
    println!("order of A: {:?}", finite_order(&a, 6)?);

    let lz1 = FiniteSemigroup::with_identity(&FiniteSemigroup::left_zero(2));
    let all: Vec<usize> = (0..lz1.size()).collect();
    let m = multiplication_matrix(&lz1, &all, &all)?;
    println!("multiplication matrix of left-zero-2 with 1: {:?}", finite_order(&m, 6)?);

    let one = lz1.find_identity().expect("monoid");
    for (b, c, d) in [(one, one, one), (0, 1, 0), (0, 1, 1)] {
        let r = two_by_two_claim(&lz1, b, c, d, 5, 6)?;
        println!(
            "[[1,{b}],[{c},{d}]]: finite {} d=bc {} d=cb {} singleton rows {:?} consistent {}",
            r.order.is_finite(),
            r.d_is_bc,
            r.d_is_cb,
            r.singleton_rows,
            r.consistent
        );
    }
    Ok(())
}
