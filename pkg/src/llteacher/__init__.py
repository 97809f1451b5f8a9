"""Guided-LLM homework service.

Instructors author assignments with hidden solutions, students work on them
through a turn-based tutoring conversation whose replies are mechanically
guarded against revealing the solution, and instructors grade by reviewing
the complete logged transcript.
"""

__version__ = "0.1.0"
