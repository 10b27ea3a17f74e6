use nalgebra::DMatrix;

#[test]
fn probe() {
    for d in [1e-8f64, 1e-9, 1e-10] {
        let avg = [(0.2f64+0.6+0.1)/3.0, (0.5+0.1+0.2)/3.0, (0.2+0.2+0.3)/3.0, (0.1+0.1+0.4)/3.0];
        let m4 = DMatrix::from_row_slice(
            4, 4,
            &[
                0.2, 0.5, 0.2, 0.1,
                0.6, 0.1, 0.2, 0.1,
                0.1, 0.2, 0.3, 0.4,
                avg[0] + d, avg[1] - d, avg[2], avg[3],
            ],
        );
        let svd = m4.clone().svd(false, false);
        let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
        println!("d={d:.0e}: singular values {sv:?}");
        let inv = m4.clone().try_inverse().unwrap();
        let g = &m4 * &inv;
        let dev = (g - DMatrix::identity(4, 4)).amax();
        println!("  gram dev {dev:.3e}  rcond(linalg) {:.3e}", chancap::linalg::rcond(&m4));
    }
}
