//! Feature templates for the character tagger.
//!
//! Feature keys are plain strings. N-gram keys carry their order, their
//! offset relative to the tagged position and the number of padding slots
//! on each side (`g{order}{offset:+}:{left}{right}:{chars}`), so a window
//! that runs off the word never collides with one made of real characters.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureTemplate {
    /// Characters considered on each side of the tagged position.
    pub radius: usize,
    pub min_order: usize,
    pub max_order: usize,
    /// Vowel/consonant classes of the previous, current and next character.
    pub char_classes: bool,
    /// Distance from both word edges, capped at [`POSITION_BUCKETS`].
    pub position_buckets: bool,
}

pub const POSITION_BUCKETS: usize = 4;

impl Default for FeatureTemplate {
    fn default() -> Self {
        FeatureTemplate {
            radius: 3,
            min_order: 1,
            max_order: 4,
            char_classes: true,
            position_buckets: true,
        }
    }
}

impl FeatureTemplate {
    pub fn is_valid(&self) -> bool {
        self.min_order >= 1
            && self.min_order <= self.max_order
            && self.max_order <= 2 * self.radius + 1
    }
}

fn class_of(c: Option<&char>) -> char {
    match c {
        None => '_',
        Some(c) => {
            let lower = c.to_lowercase().next().unwrap_or(*c);
            if "aeiou".contains(lower) {
                'v'
            } else if lower.is_alphabetic() {
                'c'
            } else {
                'o'
            }
        }
    }
}

/// Features of `word` at char index `position`.
///
/// # Panics
///
/// If `position` is not a valid char index of `word`.
pub fn extract_features(word: &str, position: usize, template: &FeatureTemplate) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    char_features(&chars, position, template)
}

pub(crate) fn char_features(
    chars: &[char],
    position: usize,
    template: &FeatureTemplate,
) -> Vec<String> {
    let n = chars.len();
    assert!(
        position < n,
        "position {position} out of range for a word of {n} chars"
    );

    let mut out = Vec::with_capacity(32);
    out.push("bias".to_string());

    let radius = template.radius as isize;
    let pos = position as isize;
    for order in template.min_order..=template.max_order {
        let order = order as isize;
        let mut offset = -radius;
        while offset + order - 1 <= radius {
            let mut key = String::with_capacity(16);
            let (mut left, mut right) = (0, 0);
            let mut text = String::new();
            for k in 0..order {
                let at = pos + offset + k;
                if at < 0 {
                    left += 1;
                } else if at >= n as isize {
                    right += 1;
                } else {
                    text.push(chars[at as usize]);
                }
            }
            let _ = write!(key, "g{order}{offset:+}:{left}{right}:{text}");
            out.push(key);
            offset += 1;
        }
    }

    if template.char_classes {
        let prev = if position > 0 {
            chars.get(position - 1)
        } else {
            None
        };
        let cur = chars.get(position);
        let next = chars.get(position + 1);
        out.push(format!("cls:{}{}", class_of(prev), class_of(cur)));
        out.push(format!(
            "cls3:{}{}{}",
            class_of(prev),
            class_of(cur),
            class_of(next)
        ));
    }

    if template.position_buckets {
        out.push(format!("pos:{}", position.min(POSITION_BUCKETS)));
        out.push(format!("rpos:{}", (n - 1 - position).min(POSITION_BUCKETS)));
    }
    out
}
