use conelab::cartan::{
    cartan_projection, fundamental_weight, jordan_projection, opposition_involution, p_theta, simple_root, two_rho,
    CartanVector, ThetaSubset,
};
use nalgebra::{DMatrix, DVector};

fn cv(c: &[f64]) -> CartanVector {
    CartanVector::new(c.to_vec(), 1e-12).unwrap()
}

fn close(a: &CartanVector, b: &[f64]) -> bool {
    a.coords().iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
}

#[test]
fn projections_of_reference_matrices() {
    let e = std::f64::consts::E;
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![e.powi(3), e, e.powi(-4), 1.0]));
    assert!(close(&cartan_projection(&d).unwrap(), &[3.0, 1.0, 0.0, -4.0]));
    assert!(close(&jordan_projection(&d).unwrap(), &[3.0, 1.0, 0.0, -4.0]));
    let rot = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    assert!(close(&cartan_projection(&rot).unwrap(), &[0.0, 0.0]));
    let unipotent = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    assert!(close(&jordan_projection(&unipotent).unwrap(), &[0.0, 0.0]));
    // eigenvalues of [[2,1],[1,1]] solve t^2 - 3t + 1 = 0
    let s = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
    let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    assert!(close(&cartan_projection(&s).unwrap(), &[l, -l]));
    assert!(close(&jordan_projection(&s).unwrap(), &[l, -l]));
    assert!(cartan_projection(&DMatrix::zeros(2, 2)).is_err());
}

#[test]
fn involution_projection_and_forms() {
    assert_eq!(opposition_involution(&cv(&[3.0, 1.0, 0.0, -4.0])), cv(&[4.0, 0.0, -1.0, -3.0]));
    assert_eq!(opposition_involution(&cv(&[2.0, -2.0])), cv(&[2.0, -2.0]));
    let theta = ThetaSubset::new(4, [1, 3]).unwrap();
    assert!(close(&p_theta(&theta, &cv(&[3.0, 1.0, 0.0, -4.0])).unwrap(), &[3.0, 0.5, 0.5, -4.0]));
    let v = cv(&[3.0, 1.0, -1.0, -3.0]);
    assert_eq!(p_theta(&ThetaSubset::full(4).unwrap(), &v).unwrap(), v);
    assert!(ThetaSubset::new(4, []).is_err());
    assert_eq!(simple_root(1, &v).unwrap(), 2.0);
    assert_eq!(two_rho(&v), 20.0);
    assert_eq!(fundamental_weight(2, &v).unwrap(), 4.0);
    assert!(simple_root(4, &v).is_err());
}
