use ramlang_core::localfield::{
    character_conductor, galois_catalog, with_precision, AdditiveCharacter, Extension, FieldError, Tower,
    DEFAULT_PREC,
};
use ramlang_core::ramification::RamDatum;
use ramlang_core::Depth;

struct Split {
    lf: RamDatum,
    lk: RamDatum,
    kf: Option<RamDatum>,
    normal: Vec<usize>,
    restricted: Vec<(usize, Depth)>,
}

fn split_at(t: &Tower, i: usize) -> Result<Split, FieldError> {
    let full = Extension::full(t)?;
    let lf = full.realize_ramdatum()?;
    let lk = Extension::new(t, i, t.top())?.realize_ramdatum()?;
    let lower = Extension::new(t, 0, i)?;
    let kf = if lower.is_galois() { Some(lower.realize_ramdatum()?) } else { None };
    let normal = full.fixing(i)?;
    let mut restricted = Vec::new();
    if kf.is_some() {
        for k in 0..full.automorphisms().len() {
            if full.in_inertia(k) && full.automorphisms()[k].j % t.res_deg(i) == 0 {
                restricted.push((k, full.restricted_depth(k, i)?));
            }
        }
    }
    Ok(Split { lf, lk, kf, normal, restricted })
}

#[test]
fn composition_laws_hold_on_every_catalog_tower() {
    let mut splits = 0;
    for desc in galois_catalog() {
        let top = desc.steps.len();
        for i in 0..=top {
            let s = with_precision(&desc, DEFAULT_PREC, |t| split_at(t, i)).unwrap();
            // the subgroup fixing K realizes L/K
            let sub = s.lf.restrict(&s.normal).unwrap();
            assert_eq!(sub.hh_phi(), s.lk.hh_phi(), "{desc} at {i}");
            let Some(kf) = s.kf else { continue };
            splits += 1;
            let q = s.lf.quotient_datum(&s.normal).unwrap();
            assert_eq!(q.hh_phi(), kf.hh_phi(), "{desc} at {i}");
            let cosets = s.lf.cosets(&s.normal).unwrap();
            for (k, d) in &s.restricted {
                let c = cosets.iter().position(|c| c.contains(k)).unwrap();
                assert_eq!(q.depth(c), Some(*d), "{desc} at {i}, aut {k}");
            }
            let (blf, blk, bkf) = (s.lf.breaks().unwrap(), s.lk.breaks().unwrap(), kf.breaks().unwrap());
            assert_eq!(s.lf.hh_phi(), kf.hh_phi().compose(&s.lk.hh_phi()), "{desc} at {i}");
            assert_eq!(s.lf.hh_psi(), s.lk.hh_psi().compose(&kf.hh_psi()), "{desc} at {i}");
            assert_eq!(blf.c, blk.c + bkf.c, "{desc} at {i}");
            assert_eq!(blf.c, blf.u - blf.ell);
        }
    }
    assert!(splits >= 40, "only {splits} Galois splits");
}

#[test]
fn conductor_difference_matches_depth_sum() {
    let chr = AdditiveCharacter::standard();
    for desc in galois_catalog().into_iter().filter(|d| d.degree() <= 12) {
        let (lf, cf, cl) = with_precision(&desc, DEFAULT_PREC, |t| {
            let lf = Extension::full(t)?.realize_ramdatum()?;
            Ok((lf, character_conductor(&chr, t, 0)?, character_conductor(&chr, t, t.top())?))
        })
        .unwrap();
        assert_eq!(lf.breaks().unwrap().c, cf - cl, "{desc}");
    }
}
