"""Learned treaps, baseline search trees and their benchmark harness."""
