use explab_core::geomdecomp::{extract_product, zero_nbhd_covering, PolyMap};
use explab_core::gridset::{energy_count, energy_pairs, image_set, GridSet1D, GridSet2D, Scale};
use explab_core::polyexpr::{
    classify_special_form, difference_form, hf_general, hf_poly, mp_numerator, parse_poly2, Interval, Poly2, Var,
    Verdict,
};
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn poly(max_degree: u32, max_terms: usize) -> impl Strategy<Value = Poly2> {
    prop::collection::vec((0..=max_degree, 0..=max_degree, -8i64..=8, 1i64..=5), 1..=max_terms).prop_map(
        move |terms| {
            Poly2::from_terms(
                terms
                    .into_iter()
                    .filter(|&(i, j, _, _)| i + j <= max_degree)
                    .map(|(i, j, n, d)| ([i, j], rat(n, d))),
            )
        },
    )
}

fn univariate(v: Var) -> impl Strategy<Value = Poly2> {
    prop::collection::vec((-4i64..=4, 1i64..=3), 1..=3).prop_map(move |cs| {
        let t = Poly2::var(v);
        let p = cs
            .iter()
            .enumerate()
            .fold(Poly2::zero(), |acc, (e, &(n, d))| &acc + &t.pow(e as u32 + 1).scale(&rat(n, d)));
        if p.is_zero() {
            t
        } else {
            p
        }
    })
}

fn swap(p: &Poly2) -> Poly2 {
    Poly2::from_terms(p.terms().map(|(e, c)| ([e[1], e[0]], c.clone())))
}

fn subset(k: u32, density: f64) -> impl Strategy<Value = GridSet1D> {
    let n = 1u64 << k;
    prop::collection::vec(prop::bool::weighted(density), n as usize).prop_map(move |bits| {
        let cells = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as u64);
        GridSet1D::new(Scale::new(k).unwrap(), cells).unwrap()
    })
}

fn nonempty_subset(k: u32, density: f64) -> impl Strategy<Value = GridSet1D> {
    subset(k, density).prop_filter("nonempty", |s| !s.is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn display_parse_round_trip(p in poly(5, 8)) {
        prop_assert_eq!(parse_poly2(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn classification_is_symmetric(p in poly(4, 6)) {
        prop_assert_eq!(classify_special_form(&p).verdict(), classify_special_form(&swap(&p)).verdict());
    }

    #[test]
    fn mp_is_antisymmetric_under_swap(p in poly(4, 6)) {
        // swapping x and y exchanges the two brackets of M_P
        let lhs = mp_numerator(&swap(&p));
        let rhs = swap(&mp_numerator(&p));
        prop_assert_eq!(lhs, -rhs);
    }

    #[test]
    fn compositions_are_special(a in univariate(Var::X), b in univariate(Var::Y), h in univariate(Var::X)) {
        let u = &a + &b;
        let composed = h
            .terms()
            .fold(Poly2::zero(), |acc, (e, c)| &acc + &u.pow(e[0]).scale(c));
        prop_assert_eq!(classify_special_form(&composed).verdict(), Verdict::SpecialForm);
        prop_assert!(mp_numerator(&composed).is_zero());
    }

    #[test]
    fn mp_matches_mixed_log_derivative(p in poly(4, 6), x in 0.1f64..0.9, y in 0.1f64..0.9) {
        let (px, py) = (p.partial(Var::X, 1), p.partial(Var::Y, 1));
        let (gx, gy) = (px.eval_f64(&[x, y]), py.eval_f64(&[x, y]));
        prop_assume!(gx.abs() > 0.5 && gy.abs() > 0.5);
        let g = |x: f64, y: f64| (px.eval_f64(&[x, y]) / py.eval_f64(&[x, y])).abs().ln();
        let h = 1e-4;
        let fd = (g(x + h, y + h) - g(x + h, y - h) - g(x - h, y + h) + g(x - h, y - h)) / (4.0 * h * h);
        let exact = mp_numerator(&p).eval_f64(&[x, y]) / (gx * gy).powi(2);
        prop_assert!((fd - exact).abs() <= 1e-3 * (1.0 + exact.abs()), "fd {} exact {}", fd, exact);
    }

    #[test]
    fn interval_enclosure_is_sound(p in poly(5, 8), cell in (0u64..64, 0u64..64), s in 0f64..=1.0, t in 0f64..=1.0) {
        let k = 6;
        let bx = [Interval::dyadic(cell.0, k), Interval::dyadic(cell.1, k)];
        let d = 1.0 / 64.0;
        let (x, y) = ((cell.0 as f64 + s) * d, (cell.1 as f64 + t) * d);
        let q = [BigRational::from_float(x).unwrap(), BigRational::from_float(y).unwrap()];
        prop_assert!(p.range(&bx).contains(&p.eval(&q)));
        let (lo, hi) = p.range_f64(&[(cell.0 as f64 * d, (cell.0 + 1) as f64 * d), (cell.1 as f64 * d, (cell.1 + 1) as f64 * d)]);
        let v = p.eval_f64(&[x, y]);
        prop_assert!(lo <= v + 1e-12 && v - 1e-12 <= hi);
    }

    #[test]
    fn general_bracket_of_difference_form(p in poly(3, 5)) {
        prop_assert_eq!(hf_general(&difference_form(&p)), hf_poly(&p));
    }

    #[test]
    fn coarsening_commutes_and_shrinks(a in subset(8, 0.2), k1 in 1u32..=8, k2 in 1u32..=8) {
        let (hi, lo) = (k1.max(k2), k1.min(k2));
        let direct = a.coarsen(lo).unwrap();
        prop_assert_eq!(a.coarsen(hi).unwrap().coarsen(lo).unwrap(), direct.clone());
        prop_assert!(direct.len() <= a.coarsen(hi).unwrap().len());
    }

    #[test]
    fn energy_at_least_product_size(p in poly(3, 5), a in nonempty_subset(5, 0.3), b in nonempty_subset(5, 0.3)) {
        let e = energy_count(&p, &a, &b, None).unwrap();
        prop_assert!(e >= (a.len() * b.len()) as u128);
    }

    #[test]
    fn energy_equals_brute_force(p in poly(4, 5), a in subset(4, 0.4), b in subset(4, 0.4)) {
        let pairs = energy_pairs(&p, &a, &b).unwrap();
        let brute = pairs
            .iter()
            .map(|r| pairs.iter().filter(|q| r.range.intersects(&q.range)).count() as u128)
            .sum::<u128>();
        prop_assert_eq!(energy_count(&p, &a, &b, None).unwrap(), brute);
    }

    #[test]
    fn image_contains_sampled_values(p in poly(3, 5), a in nonempty_subset(6, 0.2), s in 0f64..1.0, t in 0f64..1.0, pick in any::<prop::sample::Index>()) {
        let img = image_set(&p, &a, &a).unwrap();
        let k = 6;
        let d = 1.0 / 64.0;
        let (i, j) = (a.cells()[pick.index(a.len())], a.cells()[a.len() - 1 - pick.index(a.len())]);
        let q = [
            BigRational::from_float((i as f64 + s) * d).unwrap(),
            BigRational::from_float((j as f64 + t) * d).unwrap(),
        ];
        let (c, _) = img.grid.cells_for(&Interval::point(p.eval(&q)));
        prop_assert!(img.cells.contains(c), "value cell {} missing at k={}", c, k);
    }

    #[test]
    fn zero_neighbourhood_is_monotone(a in subset(5, 0.4), b in subset(5, 0.4), s1 in 0f64..1.0, s2 in 0f64..1.0) {
        let phi = PolyMap::new(parse_poly2("x - y + 1/7").unwrap());
        let full = GridSet2D::product(&a, &b).unwrap();
        let part = full.filter(|c| (c.0 + c.1) % 3 != 0);
        let d = 1.0 / 32.0;
        let (lo, hi) = (d + s1.min(s2) * (1.0 - d), d + s1.max(s2) * (1.0 - d));
        let n = |x: &GridSet2D, s| zero_nbhd_covering(&phi, x, s).unwrap();
        prop_assert!(n(&full, lo) <= n(&full, hi));
        prop_assert!(n(&part, lo) <= n(&full, lo));
    }

    #[test]
    fn extraction_keeps_half(cells in prop::collection::btree_set((0u64..32, 0u64..32), 1..300)) {
        let x = GridSet2D::new(Scale::new(5).unwrap(), cells).unwrap();
        let ex = extract_product(&x, 0.5).unwrap();
        prop_assert!(2 * ex.report.intersection >= x.len());
    }
}
