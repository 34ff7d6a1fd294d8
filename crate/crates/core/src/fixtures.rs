//! The two counterexample shifts, as in-memory values. The JSON copies live
//! under `fixtures/`.

use crate::blockshift::BlockShift;
use crate::linalg::ComplexMatrix;

/// dims (1,1,1,2,1): A_1 = [√2], A_2 = [0], A_3 = [1 0], A_4 = [0; 1].
/// w(A) = w(A′) but A′ is not a direct summand.
pub fn example23() -> BlockShift {
    let s2 = std::f64::consts::SQRT_2;
    BlockShift::new(vec![
        ComplexMatrix::from_real_rows(&[&[s2]]).unwrap(),
        ComplexMatrix::from_real_rows(&[&[0.0]]).unwrap(),
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0]]).unwrap(),
        ComplexMatrix::from_real_rows(&[&[0.0], &[1.0]]).unwrap(),
    ])
    .unwrap()
}

/// dims (1,2,1): A_1 = [1 1], A_2 = [1; −1]. A_1·A_2 = 0 and w(A) = w(A″)
/// but A″ is not a direct summand.
pub fn example35() -> BlockShift {
    BlockShift::new(vec![
        ComplexMatrix::from_real_rows(&[&[1.0, 1.0]]).unwrap(),
        ComplexMatrix::from_real_rows(&[&[1.0], &[-1.0]]).unwrap(),
    ])
    .unwrap()
}
