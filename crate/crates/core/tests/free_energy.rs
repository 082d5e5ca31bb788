//! Free energies against the known volumes of M_2 and M_3 (in p = π²), and
//! the vanishing free energies of the Airy and Lambert curves.

use toprec::catalog::{catalog_get, CatalogParams};
use toprec::coeff::Coeff;
use toprec::engine::{EngineOptions, OmegaTable};

fn table(name: &str) -> OmegaTable {
    OmegaTable::new(catalog_get(name, &CatalogParams::default()).unwrap(), EngineOptions::default()).unwrap()
}

fn p_pow(c: (i64, i64), k: u32) -> Coeff {
    &Coeff::from_frac(c.0, c.1) * &Coeff::param().pow(k)
}

#[test]
fn weil_petersson_volumes() {
    let mut t = table("weil-petersson");
    assert_eq!(t.f_g(2).unwrap(), p_pow((43, 2160), 3));
    assert_eq!(t.f_g(3).unwrap(), p_pow((176557, 1209600), 6));
}

#[test]
fn airy_and_lambert_free_energies_vanish() {
    for name in ["airy", "lambert"] {
        let mut t = table(name);
        for g in [2, 3] {
            assert!(t.f_g(g).unwrap().is_zero(), "{name} F_{g}");
        }
    }
}
