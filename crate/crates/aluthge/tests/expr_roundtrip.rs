use aluthge::expr::{parse_atoms, parse_measure, print_atoms, print_measure};
use proptest::prelude::*;

fn rational_text() -> impl Strategy<Value = String> {
    (1u32..200, prop::option::of(1u32..30)).prop_map(|(n, d)| match d {
        Some(d) => format!("{n}/{d}"),
        None => n.to_string(),
    })
}

fn term() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        (0u32..6).prop_map(|k| 2u64.pow(k).to_string()),
        (0u32..5).prop_map(|k| format!("{}/{}", 3u64.pow(k), 2u64.pow(k))),
        Just("0".to_string()),
    ];
    (prop::option::of(rational_text()), any::<bool>(), atom, "[ ]{0,2}").prop_map(
        |(c, star, atom, ws)| match c {
            Some(c) if star => format!("{c}*d({ws}{atom})"),
            Some(c) => format!("{c}{ws}d({atom}{ws})"),
            None => format!("d({atom})"),
        },
    )
}

fn expression() -> impl Strategy<Value = String> {
    (prop::option::of(any::<bool>()), prop::collection::vec((any::<bool>(), term()), 1..6)).prop_map(|(lead, terms)| {
        let mut s = match lead {
            Some(true) => "-".to_string(),
            Some(false) => "+".to_string(),
            None => String::new(),
        };
        for (i, (neg, t)) in terms.iter().enumerate() {
            if i > 0 {
                s.push_str(if *neg { " - " } else { "+" });
            }
            s.push_str(t);
        }
        s
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(s in expression()) {
        let atoms = parse_atoms(&s).unwrap();
        let text = print_atoms(&atoms);
        prop_assert_eq!(&parse_atoms(&text).unwrap(), &atoms);
        // atoms mixing bases 2 and 3/2 have no common lattice
        if let Ok(mu) = parse_measure(&s) {
            let printed = print_measure(&mu).unwrap();
            prop_assert_eq!(parse_measure(&printed).unwrap(), mu);
            prop_assert_eq!(printed, text);
        }
    }

    #[test]
    fn garbage_never_panics(s in "[-+ d()0-9/*x]{0,24}") {
        let _ = parse_atoms(&s);
    }
}
