# Core modules for the Bogoliubov toolkit
