use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;

use super::Collection;
use crate::stream::keyed_choice;
use crate::{Error, Result};

/// A collection whose entries were each drawn from one of several
/// languages, plus the id-to-language sidecar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedCollection {
    pub collection: Collection,
    pub languages: IndexMap<String, String>,
}

/// For every id, picks one language uniformly (keyed by seed and id) and
/// takes that language's text. All inputs must share the same id set; the
/// output follows the id order of the first language in sorted order.
pub fn mix_language_corpus(
    per_lang: &BTreeMap<String, Collection>,
    seed: u64,
) -> Result<MixedCollection> {
    let (first_lang, reference) = per_lang
        .iter()
        .next()
        .ok_or_else(|| Error::Invalid("no languages to mix".into()))?;
    let ref_ids: BTreeSet<&str> = reference.ids().collect();
    for (lang, coll) in per_lang {
        let ids: BTreeSet<&str> = coll.ids().collect();
        if ids != ref_ids {
            let missing: Vec<&str> = ref_ids.symmetric_difference(&ids).copied().collect();
            let shown: Vec<&str> = missing.iter().take(10).copied().collect();
            return Err(Error::IdMismatch(format!(
                "{lang} vs {first_lang}: {} ids differ, e.g. {}",
                missing.len(),
                shown.join(", ")
            )));
        }
    }
    let langs: Vec<(&String, &Collection)> = per_lang.iter().collect();
    let mut collection = Collection::new();
    let mut languages = IndexMap::with_capacity(reference.len());
    for id in reference.ids() {
        let (lang, coll) = langs[keyed_choice(seed, id, langs.len())];
        collection.insert(id, coll.get(id).expect("id sets checked above"))?;
        languages.insert(id.to_string(), lang.clone());
    }
    Ok(MixedCollection {
        collection,
        languages,
    })
}
