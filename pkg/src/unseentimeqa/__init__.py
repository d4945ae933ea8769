"""UnSeenTimeQA: contamination-free temporal QA over logistics plans.

The package synthesizes delivery scenarios, times their event plans
(serially or on a dependency DAG), asks clock-anchored questions about
package whereabouts — including counterfactual timings — and answers them
with a ground-truth location oracle.  A scorer checks model responses
against the stored answer sets.

Typical entry points:

* :func:`generate_scenario` / :func:`make_schedule` — worlds and timings
* :func:`sample_question` / :func:`gold_answer` — questions with answers
* :func:`generate_dataset` / :func:`iter_records` — the benchmark files
* :func:`ingest_record` / :func:`answer_ingested` — oracle for rendered text
* :func:`score_responses` / :func:`aggregate_report` — model evaluation
"""

from __future__ import annotations

from .domain import (GroundEvent, PlanReport, World, WorldState, apply_event,
                     event_applicable, validate_plan, validate_state,
                     validate_world)
from .errors import (ClockParseError, ClockResolutionError, ConfigError,
                     ContaminationError, CoverageError, DependencyCycleError,
                     DepthError, MalformedEventError, OracleMismatchError,
                     PerturbationError, PlanningError, PlanTextError,
                     PreconditionError, QuestionParseError, SamplingMissError,
                     SchemaError, SpanError, TemplateParseError,
                     TimelineRangeError, UnseenTimeQAError, WorldError)
from .planning import (Scenario, SizeHint, generate_scenario,
                       parse_plan_text, write_plan_text)
from .scheduling import (Perturbation, TimedEvent, TimedSchedule,
                         apply_perturbation, assign_durations,
                         build_dependency_graph, schedule_parallel,
                         schedule_serial)
from .rendering import (ParsedEventLine, ParsedQuestion, ScenarioText,
                        assemble_prompt, format_clock, parse_clock,
                        parse_event_line, parse_question_text,
                        render_event_line, render_question_text,
                        render_scenario_text)
from .tracking import (AnswerSet, PackageTimeline, build_timeline, locate_at,
                       resolve_clock, simulate_minutes)
from .questions import (Question, compute_depth, gold_answer, question_text,
                        sample_question)
from .ingest import IngestedRecord, answer_ingested, ingest_record
from .dataset import (GenerationConfig, SampleRecord, generate_dataset,
                      iter_records, make_schedule, parse_record,
                      serialize_record, verify_dataset)
from .scoring import (Verdict, aggregate_report, parse_response,
                      read_responses, score_responses)

__version__ = "0.1.0"
