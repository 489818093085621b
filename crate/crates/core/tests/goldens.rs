use lrtk::data;
use lrtk::syntree::ParseTree;
use lrtk::translit::RewriteRuleSet;

#[test]
fn starter_orthography() {
    let rules = data::fra_hat_rules();
    assert_eq!(rules.apply("elle ne pensait pas"), "èl ne panse pa");
    assert_eq!(rules.apply("unité"), "inite");
    assert_eq!(rules.apply("Unité"), "Inite");
}

#[test]
fn starter_syntax_then_orthography() {
    let tree =
        ParseTree::parse("(S (NP (PRO elle)) (VP#impf (NEG ne) (V pensait) (NEG pas) (VP (V descendre))))").unwrap();
    let out = data::fra_hat_syntax().apply(&tree).unwrap();
    assert_eq!(
        data::fra_hat_rules().apply(&out.yield_string()),
        "li pa tap panse dèsann"
    );
}

#[test]
fn determiner_follows_noun() {
    let syn = data::fra_hat_syntax();
    let tree = ParseTree::parse("(S (NP (D le) (N livre)) (ADV ce) (NP (D ce) (N matin)))").unwrap();
    // the shipped lexicon also maps the determiners
    assert_eq!(syn.apply(&tree).unwrap().yield_string(), "livre la sa matin sa");
}

#[test]
fn g2p_tables() {
    assert_eq!(data::fra_ipa_rules().apply("unité"), "ynite");
    let all = [
        data::fra_hat_rules(),
        data::fra_ipa_rules(),
        data::hat_ipa_rules(),
        data::eng_ipa_rules(),
        data::jam_ipa_rules(),
    ];
    for r in &all {
        assert!(!r.is_empty());
    }
}

#[test]
fn rule_files_round_trip_through_parse() {
    for name in [
        "fra_hat.rules",
        "fra_ipa.rules",
        "hat_ipa.rules",
        "eng_ipa.rules",
        "jam_ipa.rules",
    ] {
        let text = data::builtin(name).unwrap();
        let a = RewriteRuleSet::parse(text).unwrap();
        for w in ["unité", "maison", "the water", "kay", "ch"] {
            assert_eq!(
                a.apply(w),
                RewriteRuleSet::parse(text).unwrap().apply(w),
                "{name} on {w}"
            );
        }
    }
}
