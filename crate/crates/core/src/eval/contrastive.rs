use super::EvalError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Antecedent,
    PronounType,
    Number,
    Gender,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Antecedent, Category::PronounType, Category::Number, Category::Gender];
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Antecedent => "antecedent",
            Category::PronounType => "type",
            Category::Number => "number",
            Category::Gender => "gender",
        })
    }
}

/// A reference sentence and a copy with one mistake introduced. Sentences
/// are whitespace-tokenized strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContrastivePair {
    pub id: String,
    pub reference: String,
    pub contrastive: String,
    pub category: Category,
}

impl ContrastivePair {
    pub fn reference_tokens(&self) -> Vec<String> {
        self.reference.split_whitespace().map(str::to_string).collect()
    }

    pub fn contrastive_tokens(&self) -> Vec<String> {
        self.contrastive.split_whitespace().map(str::to_string).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub wins: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContrastiveResult {
    pub categories: BTreeMap<Category, CategoryScore>,
    pub total: usize,
    pub wins: usize,
    pub skipped: usize,
}

impl ContrastiveResult {
    pub fn accuracy(&self) -> f64 {
        percentage(self.wins, self.total)
    }
}

fn percentage(wins: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * wins as f64 / total as f64
    }
}

/// A pair counts as a win when the reference scores strictly higher than the
/// contrastive sentence. `score` returns `None` when the pair's example id
/// cannot be resolved; such pairs are skipped.
pub fn contrastive_eval<F, E>(pairs: &[ContrastivePair], mut score: F) -> Result<ContrastiveResult, E>
where
    F: FnMut(&ContrastivePair, &[String]) -> Result<Option<f64>, E>,
{
    let mut result = ContrastiveResult::default();
    for pair in pairs {
        let r = score(pair, &pair.reference_tokens())?;
        let c = score(pair, &pair.contrastive_tokens())?;
        let (Some(r), Some(c)) = (r, c) else {
            result.skipped += 1;
            continue;
        };
        let win = r > c;
        let entry = result.categories.entry(pair.category).or_default();
        entry.total += 1;
        result.total += 1;
        if win {
            entry.wins += 1;
            result.wins += 1;
        }
    }
    for s in result.categories.values_mut() {
        s.accuracy = percentage(s.wins, s.total);
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Subject,
    Object,
    PossessiveDeterminer,
    PossessivePronoun,
    Reflexive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Masculine,
    Feminine,
    Neuter,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pronoun {
    pub form: &'static str,
    pub person: u8,
    pub plural: bool,
    pub gender: Gender,
    pub case: Case,
}

const fn p(form: &'static str, person: u8, plural: bool, gender: Gender, case: Case) -> Pronoun {
    Pronoun {
        form,
        person,
        plural,
        gender,
        case,
    }
}

use Case::*;
use Gender::{Feminine as F, Masculine as M, Neuter as N, None as X};

/// English personal and possessive pronouns.
pub const PRONOUNS: &[Pronoun] = &[
    p("i", 1, false, X, Subject),
    p("me", 1, false, X, Object),
    p("my", 1, false, X, PossessiveDeterminer),
    p("mine", 1, false, X, PossessivePronoun),
    p("myself", 1, false, X, Reflexive),
    p("we", 1, true, X, Subject),
    p("us", 1, true, X, Object),
    p("our", 1, true, X, PossessiveDeterminer),
    p("ours", 1, true, X, PossessivePronoun),
    p("ourselves", 1, true, X, Reflexive),
    p("you", 2, false, X, Subject),
    p("you", 2, false, X, Object),
    p("your", 2, false, X, PossessiveDeterminer),
    p("yours", 2, false, X, PossessivePronoun),
    p("yourself", 2, false, X, Reflexive),
    p("you", 2, true, X, Subject),
    p("you", 2, true, X, Object),
    p("your", 2, true, X, PossessiveDeterminer),
    p("yours", 2, true, X, PossessivePronoun),
    p("yourselves", 2, true, X, Reflexive),
    p("he", 3, false, M, Subject),
    p("him", 3, false, M, Object),
    p("his", 3, false, M, PossessiveDeterminer),
    p("his", 3, false, M, PossessivePronoun),
    p("himself", 3, false, M, Reflexive),
    p("she", 3, false, F, Subject),
    p("her", 3, false, F, Object),
    p("her", 3, false, F, PossessiveDeterminer),
    p("hers", 3, false, F, PossessivePronoun),
    p("herself", 3, false, F, Reflexive),
    p("it", 3, false, N, Subject),
    p("it", 3, false, N, Object),
    p("its", 3, false, N, PossessiveDeterminer),
    p("its", 3, false, N, PossessivePronoun),
    p("itself", 3, false, N, Reflexive),
    p("they", 3, true, X, Subject),
    p("them", 3, true, X, Object),
    p("their", 3, true, X, PossessiveDeterminer),
    p("theirs", 3, true, X, PossessivePronoun),
    p("themselves", 3, true, X, Reflexive),
];

/// First table entry for `form`, restricted to `case` when given.
pub fn lookup_pronoun(form: &str, case: Option<Case>) -> Option<&'static Pronoun> {
    let form = form.to_lowercase();
    PRONOUNS
        .iter()
        .find(|p| p.form == form && case.is_none_or(|c| p.case == c))
}

fn find(person: u8, plural: bool, gender: Gender, case: Case) -> Option<&'static Pronoun> {
    PRONOUNS
        .iter()
        .find(|p| p.person == person && p.plural == plural && p.gender == gender && p.case == case)
}

/// Same person, number and gender, different case (his → him).
pub fn swap_type(p: &Pronoun) -> Option<&'static str> {
    [Object, Subject, PossessiveDeterminer]
        .into_iter()
        .filter(|&c| c != p.case)
        .filter_map(|c| find(p.person, p.plural, p.gender, c))
        .map(|q| q.form)
        .find(|f| *f != p.form)
}

/// Same person and case, other number (his → their). Third-person plural
/// goes to the masculine singular.
pub fn swap_number(p: &Pronoun) -> Option<&'static str> {
    let gender = match (p.person, p.plural) {
        (3, false) => Gender::None,
        (3, true) => Gender::Masculine,
        _ => Gender::None,
    };
    find(p.person, !p.plural, gender, p.case).map(|q| q.form).filter(|f| *f != p.form)
}

/// Masculine ↔ feminine, same person, number and case (his → her).
pub fn swap_gender(p: &Pronoun) -> Option<&'static str> {
    let other = match p.gender {
        Gender::Masculine => Gender::Feminine,
        Gender::Feminine => Gender::Masculine,
        _ => return None,
    };
    find(p.person, p.plural, other, p.case).map(|q| q.form).filter(|f| *f != p.form)
}

/// One annotated pronoun mention: token span `[start, end)` of the pronoun
/// and of its antecedent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub span: (usize, usize),
    pub antecedent: (usize, usize),
    /// Disambiguates forms such as `her`.
    #[serde(default)]
    pub case: Option<Case>,
}

/// Annotation line: example id and its pronoun mentions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: String,
    pub mentions: Vec<Mention>,
}

fn replace(tokens: &[String], (start, end): (usize, usize), with: &[String]) -> String {
    let mut out: Vec<&str> = tokens[..start].iter().map(String::as_str).collect();
    out.extend(with.iter().map(String::as_str));
    out.extend(tokens[end..].iter().map(String::as_str));
    out.join(" ")
}

/// Applies the antecedent, type, number and gender replacements to every
/// annotated mention. A rule that would leave the sentence unchanged, or
/// that does not apply to the pronoun, produces no pair.
pub fn make_contrastive_pairs(id: &str, reference: &[String], mentions: &[Mention]) -> Result<Vec<ContrastivePair>, EvalError> {
    let n = reference.len();
    let mut pairs = Vec::new();
    let sentence = reference.join(" ");
    for m in mentions {
        for (lo, hi) in [m.span, m.antecedent] {
            if lo >= hi || hi > n {
                return Err(EvalError::BadSpan {
                    id: id.to_string(),
                    span: (lo, hi),
                    len: n,
                });
            }
        }
        let mut push = |category, contrastive: String| {
            if contrastive != sentence {
                pairs.push(ContrastivePair {
                    id: id.to_string(),
                    reference: sentence.clone(),
                    contrastive,
                    category,
                });
            }
        };
        let antecedent = &reference[m.antecedent.0..m.antecedent.1];
        push(Category::Antecedent, replace(reference, m.span, antecedent));

        if m.span.1 - m.span.0 != 1 {
            continue;
        }
        let Some(pronoun) = lookup_pronoun(&reference[m.span.0], m.case) else {
            continue;
        };
        let swaps = [
            (Category::PronounType, swap_type(pronoun)),
            (Category::Number, swap_number(pronoun)),
            (Category::Gender, swap_gender(pronoun)),
        ];
        for (category, form) in swaps {
            if let Some(form) = form {
                push(category, replace(reference, m.span, &[form.to_string()]));
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn pizza_example() {
        let r = toks("john ate the pizza with his fingers");
        let m = Mention {
            span: (5, 6),
            antecedent: (0, 1),
            case: Some(Case::PossessiveDeterminer),
        };
        let pairs = make_contrastive_pairs("x", &r, &[m]).unwrap();
        let by = |c| pairs.iter().find(|p| p.category == c).unwrap().contrastive.clone();
        assert_eq!(by(Category::Antecedent), "john ate the pizza with john fingers");
        assert_eq!(by(Category::PronounType), "john ate the pizza with him fingers");
        assert_eq!(by(Category::Number), "john ate the pizza with their fingers");
        assert_eq!(by(Category::Gender), "john ate the pizza with her fingers");
        assert_eq!(pairs.len(), 4);
    }

    #[test]
    fn swaps() {
        let she = lookup_pronoun("she", None).unwrap();
        assert_eq!(swap_type(she), Some("her"));
        assert_eq!(swap_gender(she), Some("he"));
        assert_eq!(swap_number(she), Some("they"));
        let they = lookup_pronoun("they", None).unwrap();
        assert_eq!(swap_gender(they), None);
        assert_eq!(swap_number(they), Some("he"));
        let it = lookup_pronoun("it", None).unwrap();
        assert_eq!(swap_type(it), Some("its"));
        let you = lookup_pronoun("you", None).unwrap();
        assert_eq!(swap_number(you), None);
    }

    #[test]
    fn out_of_range_span() {
        let r = toks("he left");
        let m = Mention {
            span: (2, 3),
            antecedent: (0, 1),
            case: None,
        };
        assert!(matches!(make_contrastive_pairs("x", &r, &[m]), Err(EvalError::BadSpan { .. })));
    }

    fn pair(category: Category, reference: &str, contrastive: &str) -> ContrastivePair {
        ContrastivePair {
            id: "a".into(),
            reference: reference.into(),
            contrastive: contrastive.into(),
            category,
        }
    }

    #[test]
    fn ties_lose_and_categories_partition() {
        let pairs = vec![
            pair(Category::Gender, "a b", "a b"),
            pair(Category::Gender, "a b c", "a"),
            pair(Category::Number, "x", "y z"),
            ContrastivePair { id: "missing".into(), ..pair(Category::Number, "x", "y") },
        ];
        // longer sentences score higher; unknown ids are unresolvable
        let r = contrastive_eval(&pairs, |p, t| Ok::<_, ()>((p.id != "missing").then_some(t.len() as f64))).unwrap();
        assert_eq!(r.skipped, 1);
        assert_eq!(r.total, 3);
        assert_eq!(r.categories[&Category::Gender].wins, 1);
        assert_eq!(r.categories[&Category::Gender].total, 2);
        assert_eq!(r.categories[&Category::Number].wins, 0);
        assert_eq!(r.categories.values().map(|c| c.total).sum::<usize>(), r.total);
        assert_eq!(r.categories[&Category::Gender].accuracy, 50.0);
    }
}
