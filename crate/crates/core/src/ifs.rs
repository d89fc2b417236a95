//! The three plane contractions whose invariant set is the graph of `F_a`.
//!
//! ```text
//! w₁(x, y) = (x/3,       a·y)
//! w₂(x, y) = ((2−x)/3,   (2a−1)·y + (1−a))
//! w₃(x, y) = ((2+x)/3,   a·y + (1−a))
//! ```

use crate::param::{Parameter, Scalar};

/// A diagonal affine map `(x, y) ↦ (sx·x + tx, sy·y + ty)` of the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap2D<T> {
    index: u8,
    linear: [[T; 2]; 2],
    offset: [T; 2],
}

impl<T: Scalar> AffineMap2D<T> {
    fn diagonal(index: u8, sx: T, tx: T, sy: T, ty: T) -> Self {
        AffineMap2D {
            index,
            linear: [[sx, T::zero()], [T::zero(), sy]],
            offset: [tx, ty],
        }
    }

    /// 1, 2 or 3.
    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn linear(&self) -> &[[T; 2]; 2] {
        &self.linear
    }

    pub fn offset(&self) -> &[T; 2] {
        &self.offset
    }

    /// Signed horizontal factor, `±1/3`.
    pub fn horizontal_ratio(&self) -> &T {
        &self.linear[0][0]
    }

    /// Signed vertical factor: `a`, `2a−1` or `a`.
    pub fn vertical_multiplier(&self) -> &T {
        &self.linear[1][1]
    }

    pub fn apply(&self, (x, y): (T, T)) -> (T, T) {
        let [[m00, m01], [m10, m11]] = &self.linear;
        let nx = m00.clone() * x.clone() + m01.clone() * y.clone() + self.offset[0].clone();
        let ny = m10.clone() * x + m11.clone() * y + self.offset[1].clone();
        (nx, ny)
    }
}

/// `[w₁, w₂, w₃]` for parameter `a`.
pub fn ifs_maps<T: Scalar>(a: &Parameter) -> [AffineMap2D<T>; 3] {
    let a = T::from_parameter(a);
    let one = T::one();
    let third = T::from_ratio(1, 3);
    let two_thirds = T::from_ratio(2, 3);
    let lift = one.clone() - a.clone();
    let fold = a.clone() + a.clone() - one;
    [
        AffineMap2D::diagonal(1, third.clone(), T::zero(), a.clone(), T::zero()),
        AffineMap2D::diagonal(2, -third.clone(), two_thirds.clone(), fold, lift.clone()),
        AffineMap2D::diagonal(3, third, two_thirds, a, lift),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::sample_graph;
    use num::{BigRational, One, Signed, Zero};
    use std::collections::BTreeSet;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn corner_images() {
        let a = Parameter::ratio(3, 5).unwrap();
        let [w1, w2, w3] = ifs_maps::<BigRational>(&a);
        let one = (BigRational::one(), BigRational::one());
        let zero = (BigRational::zero(), BigRational::zero());
        assert_eq!(w3.apply(one.clone()), one);
        assert_eq!(w1.apply(one.clone()), (q(1, 3), q(3, 5)));
        assert_eq!(w2.apply(zero), (q(2, 3), q(2, 5)));
    }

    #[test]
    fn contraction_ratios() {
        let a = Parameter::ratio(7, 10).unwrap();
        let maps = ifs_maps::<BigRational>(&a);
        let expected = [q(7, 10), q(2, 5), q(7, 10)];
        for (w, m) in maps.iter().zip(expected) {
            assert_eq!(w.horizontal_ratio().abs(), q(1, 3));
            assert_eq!(*w.vertical_multiplier(), m);
        }
        assert_eq!(maps.map(|w| w.index()), [1, 2, 3]);
    }

    #[test]
    fn images_of_level_i_give_level_i_plus_one() {
        for a in [q(1, 4), q(1, 2), q(3, 5), q(2, 3), q(4, 5)] {
            let a = Parameter::from_rational(a).unwrap();
            let maps = ifs_maps::<BigRational>(&a);
            for level in 0..5 {
                let coarse = sample_graph::<BigRational>(&a, level).unwrap();
                let image: BTreeSet<_> = maps
                    .iter()
                    .flat_map(|w| coarse.iter().map(|p| w.apply(p.clone())))
                    .collect();
                let fine: BTreeSet<_> = sample_graph::<BigRational>(&a, level + 1)
                    .unwrap()
                    .into_iter()
                    .collect();
                assert_eq!(image, fine, "a = {a}, level {level}");
            }
        }
    }
}
