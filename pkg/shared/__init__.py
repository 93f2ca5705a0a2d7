"""Shared configuration, records and errors for the squeezing toolkit."""
