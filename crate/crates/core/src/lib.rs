//! Highlighting effort- and outcome-based praise in tutor responses.
//!
//! The crate covers the whole pipeline: tokenizing responses
//! ([`text`]), expert span annotation and IO labels ([`annotation`]),
//! prompting a chat model and aligning its phrases ([`llm`]), scoring
//! highlights with F1, IoU and the modified IoU family ([`metrics`]), the
//! split / partition / fine-tune / evaluate protocol ([`experiment`]) and
//! trainee-facing feedback ([`feedback`]).

pub mod annotation;
pub mod bundled;
pub mod experiment;
pub mod feedback;
pub mod llm;
pub mod metrics;
pub mod text;
