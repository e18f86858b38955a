//! Binary words and the distance/search primitives built on them.

mod bitstring;
mod edit;
mod search;

pub use bitstring::{bits, BitString, Interval, ParseBitsError};
pub use edit::{edit_distance, edit_distance_within, lcs_length, lcs_matching, Matching};
pub use search::{find_closest_subword, find_closest_subword_indexed, find_common_word, CommonWord, SubwordIndex};
