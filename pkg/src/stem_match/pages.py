"""Personalized static HTML pages listing each student's role models.

One self-contained page per student: a greeting, one profile link per
ranked candidate (display name, industry, location), and an optional
survey link.  Rendering is deliberately free of timestamps or any other
run-varying content so identical inputs produce identical bytes.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping
from urllib.parse import urlsplit

from .matching import MatchResult
from .records import CandidateRecord, StudentRecord

PROFILE_URL_TEMPLATE = "https://www.linkedin.com/in/{id}"

_SAFE_FILENAME = re.compile(r"[A-Za-z0-9._-]+\Z")


class PageError(ValueError):
    """Raised for unrenderable page inputs."""


@dataclass(frozen=True)
class PageEntry:
    display_name: str
    profile_url: str
    industry: str
    location: str


@dataclass(frozen=True)
class PageSpec:
    """Everything that appears on one student's page."""

    student_id: str
    greeting_name: str
    entries: tuple[PageEntry, ...]
    survey_url: str | None = None

    def __post_init__(self) -> None:
        if not self.entries:
            raise PageError(f"page for {self.student_id!r} has no entries")
        for url in [e.profile_url for e in self.entries] + (
            [self.survey_url] if self.survey_url else []
        ):
            _check_url(url)


def _check_url(url: str) -> None:
    parts = urlsplit(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise PageError(f"not a valid http(s) URL: {url!r}")


def build_page_spec(result: MatchResult, student: StudentRecord,
                    candidates: Mapping[str, CandidateRecord],
                    survey_url: str | None = None,
                    url_template: str = PROFILE_URL_TEMPLATE) -> PageSpec:
    """Assemble the page contents for one match result.

    Profile URLs are derived from candidate ids through ``url_template``
    (records carry no URL field of their own).
    """
    if not result.ranked:
        raise PageError(f"match result for {result.student_id!r} is empty")
    entries = []
    for candidate_id, _ in result.ranked:
        record = candidates.get(candidate_id)
        if record is None:
            raise PageError(
                f"no candidate record for ranked id {candidate_id!r} "
                f"(student {result.student_id!r})"
            )
        entries.append(
            PageEntry(
                display_name=record.full_name.strip() or record.id,
                profile_url=url_template.format(id=record.id),
                industry=record.industry,
                location=record.location_raw,
            )
        )
    return PageSpec(
        student_id=result.student_id,
        greeting_name=student.display_name or student.id,
        entries=tuple(entries),
        survey_url=survey_url,
    )


_PAGE_STYLE = """\
body { font-family: Georgia, 'Times New Roman', serif; max-width: 40rem;
       margin: 2rem auto; padding: 0 1rem; color: #222; }
h1 { font-size: 1.6rem; }
ol.rolemodels { padding-left: 1.4rem; }
ol.rolemodels li { margin: 0.8rem 0; }
.meta { display: block; color: #555; font-size: 0.9rem; }
.survey { margin-top: 2rem; border-top: 1px solid #ccc; padding-top: 1rem; }"""


def render_page(spec: PageSpec) -> str:
    """Render a page spec to a full HTML document string."""
    greeting = html.escape(spec.greeting_name)
    items = []
    for entry in spec.entries:
        meta = " · ".join(part for part in (entry.industry, entry.location) if part)
        items.append(
            "    <li><a href=\"{url}\">{name}</a>"
            "<span class=\"meta\">{meta}</span></li>".format(
                url=html.escape(entry.profile_url, quote=True),
                name=html.escape(entry.display_name),
                meta=html.escape(meta),
            )
        )
    survey = ""
    if spec.survey_url:
        survey = (
            "  <p class=\"survey\"><a href=\"{url}\">"
            "Tell us what you think of your matches</a></p>\n".format(
                url=html.escape(spec.survey_url, quote=True)
            )
        )
    return (
        "<!DOCTYPE html>\n"
        "<html lang=\"en\">\n"
        "<head>\n"
        "<meta charset=\"utf-8\">\n"
        f"<title>STEM role models for {greeting}</title>\n"
        f"<style>\n{_PAGE_STYLE}\n</style>\n"
        "</head>\n"
        "<body>\n"
        f"  <h1>Hi {greeting}, meet your STEM role models</h1>\n"
        "  <p>We looked for professionals who share your background and your\n"
        "  interests. Here is who we found:</p>\n"
        "  <ol class=\"rolemodels\">\n"
        + "\n".join(items)
        + "\n  </ol>\n"
        + survey
        + "</body>\n"
        "</html>\n"
    )


def generate_page(result: MatchResult, student: StudentRecord,
                  candidates: Mapping[str, CandidateRecord],
                  survey_url: str | None = None,
                  url_template: str = PROFILE_URL_TEMPLATE) -> str:
    """Build and render one student's page in a single call."""
    return render_page(build_page_spec(result, student, candidates, survey_url, url_template))


def write_pages(results: Iterable[MatchResult], students: Mapping[str, StudentRecord],
                candidates: Mapping[str, CandidateRecord], out_dir: str | Path,
                survey_url: str | None = None,
                url_template: str = PROFILE_URL_TEMPLATE) -> list[Path]:
    """Write ``<out_dir>/<student_id>.html`` for every result."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for result in results:
        student = students.get(result.student_id)
        if student is None:
            raise PageError(f"no student record for result {result.student_id!r}")
        if not _SAFE_FILENAME.match(result.student_id):
            raise PageError(f"student id {result.student_id!r} is not filename-safe")
        text = generate_page(result, student, candidates, survey_url, url_template)
        path = directory / f"{result.student_id}.html"
        path.write_text(text, encoding="utf-8", newline="\n")
        written.append(path)
    return written
