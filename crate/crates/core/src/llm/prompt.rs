//! The two-shot highlighting conversation.

use serde::{Deserialize, Serialize};

use super::LlmError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

/// One turn of a chat conversation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> Result<Self, LlmError> {
        let content = content.into();
        if content.trim().is_empty() {
            return Err(LlmError::EmptyMessage);
        }
        Ok(ChatMessage { role, content })
    }

    pub fn system(content: &str) -> Self {
        Self::fixed(Role::System, content)
    }

    pub fn user(content: &str) -> Self {
        Self::fixed(Role::User, content)
    }

    pub fn assistant(content: &str) -> Self {
        Self::fixed(Role::Assistant, content)
    }

    fn fixed(role: Role, content: &str) -> Self {
        debug_assert!(!content.trim().is_empty());
        ChatMessage {
            role,
            content: content.to_string(),
        }
    }
}

pub const SYSTEM_INSTRUCTION: &str = "You are a response evaluator designed to output JSON. \
Your task is to analyze tutor responses based on the principles of effective praise focusing on \
'effort' and 'outcome'. Extract words or phrases that represent praise for the student's effort \
and outcome, and output the results in JSON format with keys titled 'Effort' and 'Outcome'.";

/// Principles of effective praise from the tutor-training lesson.
pub const LESSON_PRINCIPLE: &str = "The following is the principle that a correct response should follow:
Praising students for working hard and putting forth effort is a great way to increase student motivation. When the learning gets tough, giving correct praise is a powerful strategy to encourage students to keep going.
The correct response should be :
-perceived as sincere, earned, and truthful.
-specific by giving details of what the student did well.
-immediate with praise given right after the student action.
-authentic and is not repeated often, such as \u{201c}great job\u{201d} which loses meaning and becomes predictable.
-focused on the learning process, not ability (AJTutoring.com, 2022)
Correct responses must follow some, but not all the above.
There are two types of praise responses: Effort and Outcome praise
- Effort praise focuses on the learning process. Effort praise recognizes students for putting forth effort and persevering through the learning process instead of focusing on whether a student got the problem correct or pure ability.
- Outcome praise showcases student's achievements, such as getting a grade A on an assignment or getting a problem correct, and is often, but not always, associated with unproductive praise.
To receive full credit of correct praise, tutors cannot just say \"great job\" and praise with no specific reasoning. Tutors need to praise for effort AND be positive and encouraging.";

const ASK: &str = "Sure, can you provide a tutor response for analysis";
const ASK_Q: &str = "Sure, can you provide a tutor response for analysis?";
const AGAIN: &str = "Nice, let's do it again.";
const OUTCOME_SHOT: &str =
    "An example of outcome-based praise is: \"Great job! You are a genius!\"";
const OUTCOME_ANSWER: &str =
    "An output json format is: {\"effort\": [], \"outcome\": [\"Great job\"]}";
const EFFORT_SHOT: &str = "An example of effort-based praise is: \"You are almost there! I am proud of how you are persevering through and striving to solve the problem. Keep going!\"";
const EFFORT_ANSWER: &str = "An output json format is: {\"effort\": [\"persevering through and striving to solve the problem\", \"Keep going\"], \"outcome\": []}";

/// Sent after a reply that could not be parsed.
pub const CORRECTIVE_TURN: &str = "Your previous reply could not be read. Reply with only a JSON \
object of the form {\"effort\": [...], \"outcome\": [...]} where every entry is a phrase copied \
exactly from the tutor response.";

/// The conversation sent to the model for one tutor response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub messages: Vec<ChatMessage>,
    pub lesson_principle: String,
}

/// Instruction, lesson principle and both worked examples, ending with the
/// assistant asking for the response to analyse.
pub fn prompt_preamble() -> Vec<ChatMessage> {
    vec![
        ChatMessage::system(SYSTEM_INSTRUCTION),
        ChatMessage::user(LESSON_PRINCIPLE),
        ChatMessage::assistant(ASK),
        ChatMessage::user(OUTCOME_SHOT),
        ChatMessage::assistant(OUTCOME_ANSWER),
        ChatMessage::user(AGAIN),
        ChatMessage::assistant(ASK_Q),
        ChatMessage::user(EFFORT_SHOT),
        ChatMessage::assistant(EFFORT_ANSWER),
        ChatMessage::user(AGAIN),
        ChatMessage::assistant(ASK),
    ]
}

pub fn build_highlight_prompt(response_text: &str) -> Result<PromptBundle, LlmError> {
    if response_text.trim().is_empty() {
        return Err(LlmError::EmptyResponse);
    }
    let mut messages = prompt_preamble();
    messages.push(ChatMessage::new(Role::User, response_text)?);
    Ok(PromptBundle {
        messages,
        lesson_principle: LESSON_PRINCIPLE.to_string(),
    })
}
