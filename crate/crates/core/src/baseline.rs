//! A non-neural reinflection baseline.
//!
//! Each training pair is aligned on its leftmost longest common substring,
//! giving a rule that rewrites the material before and after it:
//! `gagišvebt → gamišveb` with stem `išveb` yields `ga|g → ga|m`, `t → ∅`.
//! Rules are counted per (source tag, target tag) pair. Prediction applies
//! the best-supported pair rule whose context matches and copies the source
//! when none does.
//!
//! [`Backoff::Paradigm`] adds three fallbacks, tried in this order around
//! the pair rules: a form remembered for the target cell of the same lemma
//! (before), a pair rule into the target tag applied to another remembered
//! cell of the lemma (after), and rules keyed by the target tag alone
//! (last).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::schema::FeatureInventory;
use crate::split::{ReinflectionInstance, ReinflectionQuery};

/// `source_prefix + middle + source_suffix → target_prefix + middle + target_suffix`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub source_prefix: String,
    pub source_suffix: String,
    pub target_prefix: String,
    pub target_suffix: String,
}

impl Rule {
    /// Aligns `source` and `target` on their leftmost longest common
    /// substring (leftmost in `source`, then in `target`).
    pub fn extract(source: &str, target: &str) -> Rule {
        let s: Vec<char> = source.chars().collect();
        let t: Vec<char> = target.chars().collect();
        let (mut best_len, mut best_i, mut best_j) = (0, 0, 0);
        let mut prev = vec![0usize; t.len() + 1];
        let mut cur = vec![0usize; t.len() + 1];
        for i in 1..=s.len() {
            for j in 1..=t.len() {
                cur[j] = if s[i - 1] == t[j - 1] { prev[j - 1] + 1 } else { 0 };
                let start_i = i - cur[j];
                let start_j = j - cur[j];
                let better =
                    cur[j] > best_len || (cur[j] == best_len && cur[j] > 0 && (start_i, start_j) < (best_i, best_j));
                if better {
                    best_len = cur[j];
                    best_i = start_i;
                    best_j = start_j;
                }
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        let take = |v: &[char]| v.iter().collect::<String>();
        Rule {
            source_prefix: take(&s[..best_i]),
            source_suffix: take(&s[best_i + best_len..]),
            target_prefix: take(&t[..best_j]),
            target_suffix: take(&t[best_j + best_len..]),
        }
    }

    pub fn apply(&self, source: &str) -> Option<String> {
        let rest = source.strip_prefix(self.source_prefix.as_str())?;
        let middle = rest.strip_suffix(self.source_suffix.as_str())?;
        Some(format!("{}{}{}", self.target_prefix, middle, self.target_suffix))
    }

    fn sort_key(&self) -> String {
        format!("{}\t{}\t{}\t{}", self.source_prefix, self.source_suffix, self.target_prefix, self.target_suffix)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedRule {
    pub rule: Rule,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backoff {
    /// Pair rules, then copy.
    #[default]
    None,
    /// Remembered cells, pair rules, chained pair rules, target-tag rules,
    /// then copy.
    Paradigm,
}

impl std::str::FromStr for Backoff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Backoff::None),
            "paradigm" => Ok(Backoff::Paradigm),
            other => Err(format!("unknown backoff {other:?} (expected none or paradigm)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineModel {
    #[serde(default)]
    pub backoff: Backoff,
    /// Keyed `"<source tag> -> <target tag>"`, best rule first.
    pub pair_rules: BTreeMap<String, Vec<WeightedRule>>,
    /// Keyed by target tag, best rule first.
    pub target_rules: BTreeMap<String, Vec<WeightedRule>>,
    /// Keyed by lemma, then tag.
    pub forms: BTreeMap<String, BTreeMap<String, String>>,
}

fn ranked(counts: BTreeMap<Rule, usize>) -> Vec<WeightedRule> {
    let mut rules: Vec<WeightedRule> =
        counts.into_iter().map(|(rule, support)| WeightedRule { rule, support }).collect();
    rules.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.rule.sort_key().cmp(&b.rule.sort_key())));
    rules
}

impl BaselineModel {
    pub fn train(instances: &[ReinflectionInstance]) -> BaselineModel {
        Self::train_with(instances, Backoff::None)
    }

    pub fn train_with(instances: &[ReinflectionInstance], backoff: Backoff) -> BaselineModel {
        let inv = FeatureInventory::default_ref();
        let mut pair: BTreeMap<String, BTreeMap<Rule, usize>> = BTreeMap::new();
        let mut target: BTreeMap<String, BTreeMap<Rule, usize>> = BTreeMap::new();
        let mut forms: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for x in instances {
            let known = forms.entry(x.lemma.clone()).or_default();
            known.entry(inv.render(&x.source_tag)).or_insert_with(|| x.source_form.clone());
            known.entry(inv.render(&x.target_tag)).or_insert_with(|| x.target_form.clone());
            let rule = Rule::extract(&x.source_form, &x.target_form);
            let tgt = inv.render(&x.target_tag);
            let key = format!("{} -> {}", inv.render(&x.source_tag), tgt);
            *pair.entry(key).or_default().entry(rule.clone()).or_default() += 1;
            *target.entry(tgt).or_default().entry(rule).or_default() += 1;
        }
        BaselineModel {
            backoff,
            pair_rules: pair.into_iter().map(|(k, v)| (k, ranked(v))).collect(),
            target_rules: target.into_iter().map(|(k, v)| (k, ranked(v))).collect(),
            forms,
        }
    }

    pub fn predict(&self, query: &ReinflectionQuery) -> String {
        let inv = FeatureInventory::default_ref();
        let tgt = inv.render(&query.target_tag);
        let src = inv.render(&query.source_tag);
        let paradigm = self.backoff == Backoff::Paradigm;
        let known = self.forms.get(&query.lemma).filter(|_| paradigm);
        if let Some(form) = known.and_then(|k| k.get(&tgt)) {
            return form.clone();
        }
        let first_match = |rules: Option<&Vec<WeightedRule>>, form: &str| {
            rules.into_iter().flatten().find_map(|w| w.rule.apply(form).map(|out| (w.support, out)))
        };
        if let Some((_, out)) = first_match(self.pair_rules.get(&format!("{src} -> {tgt}")), &query.source_form) {
            return out;
        }
        if !paradigm {
            return query.source_form.clone();
        }
        let chained = known
            .into_iter()
            .flatten()
            .filter(|(tag, _)| **tag != src)
            .filter_map(|(tag, form)| first_match(self.pair_rules.get(&format!("{tag} -> {tgt}")), form))
            .min_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        if let Some((_, out)) = chained {
            return out;
        }
        first_match(self.target_rules.get(&tgt), &query.source_form)
            .map(|(_, out)| out)
            .unwrap_or_else(|| query.source_form.clone())
    }

    pub fn predict_all(&self, queries: &[ReinflectionQuery]) -> Vec<String> {
        queries.iter().map(|q| self.predict(q)).collect()
    }

    pub fn save<W: Write>(&self, writer: W) -> serde_json::Result<()> {
        serde_json::to_writer(writer, self)
    }

    pub fn load<R: Read>(reader: R) -> serde_json::Result<BaselineModel> {
        serde_json::from_reader(reader)
    }
}
